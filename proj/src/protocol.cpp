#include "crowdsense/protocol.hpp"

#include "crowdsense/csopt.hpp"
#include "crowdsense/scenario.hpp"

#include <algorithm>
#include <cstdio>

namespace crowdsense::protocol {
namespace {

std::string hex64(std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

// First block boundary strictly after t (blocks sit at multiples of t_b).
SimTime next_block_after(SimTime t, SimTime t_b) { return (t / t_b + 1) * t_b; }

}  // namespace

SimTime end_to_end_delay(const ProtocolTiming& t) {
  if (t.t_b <= 0 || t.t_ann < 0 || t.t_bidding < 0 || t.t_csopt < 0 || t.t_task < 0)
    throw std::invalid_argument("timing parameters must be nonnegative (t_b positive)");
  return std::max(t.t_b, t.t_ann) + t.t_bidding + t.t_csopt + std::max(t.t_b, t.t_task) + t.t_b;
}

PseudonymRegistry::PseudonymRegistry(std::uint64_t master_seed) : rng_(master_seed) {}

Address PseudonymRegistry::issue(int auction_index, int user_id) {
  const auto key = std::make_pair(auction_index, user_id);
  if (by_auction_user_.count(key))
    throw std::logic_error("pseudonym already issued for this auction/user");
  while (true) {
    Address address{};
    for (std::size_t i = 0; i < address.size(); i += 8) {
      const std::uint64_t word = rng_();
      for (std::size_t b = 0; b < 8; ++b)
        address[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
    }
    const bool zero = std::all_of(address.begin(), address.end(), [](auto b) { return b == 0; });
    if (zero || used_.count(address)) continue;
    used_.insert(address);
    issued_.push_back(address);
    by_auction_user_[key] = address;
    reverse_[address] = key;
    return address;
  }
}

std::optional<int> PseudonymRegistry::real_user(int auction_index, const Address& pseudonym) const {
  auto it = reverse_.find(pseudonym);
  if (it == reverse_.end() || it->second.first != auction_index) return std::nullopt;
  return it->second.second;
}

void RRContract::on_transaction(chain::Ledger& ledger, const chain::Transaction& tx,
                                const chain::Block& block) {
  (void)ledger, (void)block;
  if (tx.kind == "register_request") escrow_ += tx.credits;
}

void RRContract::set_data(const Address& da, const std::string& digest) {
  da_address_ = da;
  data_digest_ = digest;
}

void RRContract::on_block(chain::Ledger& ledger, const chain::Block& block) {
  if (settled_ || block.mined_at < deadline_) return;
  settled_ = true;
  if (da_address_ && data_digest_) {
    if (escrow_ > 0)
      ledger.transfer(self_, isp_, escrow_, "registration_fee_settled", {});
  } else {
    refunded_ = true;
    if (escrow_ > 0) ledger.transfer(self_, csp_, escrow_, "registration_refund", {});
  }
  escrow_ = 0;
}

void DAContract::arm(Credits price, std::string sealed_blob) {
  price_ = price;
  blob_ = std::move(sealed_blob);
  ready_ = true;
}

void DAContract::on_transaction(chain::Ledger& ledger, const chain::Transaction& tx,
                                const chain::Block& block) {
  (void)block;
  if (tx.kind != "access_data") return;
  if (!ready_) {
    ledger.transfer(self_, tx.sender, tx.credits, "access_rejected_not_ready", {});
    return;
  }
  if (tx.sender != owner_) {
    ledger.transfer(self_, tx.sender, tx.credits, "access_rejected_wrong_owner", {});
    return;
  }
  if (tx.credits != price_) {
    ledger.transfer(self_, tx.sender, tx.credits, "access_rejected_bad_price", {});
    return;
  }
  ledger.transfer(self_, isp_, price_, "data_purchase", {{"price", price_}});
  access_log_.push_back(tx.sender);
  delivered_ = blob_;
}

void MUPContract::arm(std::map<Address, Entry> allocation, SimTime task_deadline,
                      Credits total_payment, std::string blob) {
  allocation_ = std::move(allocation);
  task_deadline_ = task_deadline;
  total_payment_ = total_payment;
  blob_ = std::move(blob);
  armed_ = true;
}

void MUPContract::complete_data(chain::Ledger& ledger) {
  if (da_ready_) return;
  da_ready_ = true;
  std::string combined;
  for (const std::string& digest : digests_) combined += digest;
  da_->arm(total_payment_, blob_);
  rr_->set_data(da_address_, hex64(chain::fnv1a64(combined)));
  ledger.transfer(self_, da_address_, 0, "da_created", {{"price", total_payment_}});
}

void MUPContract::on_transaction(chain::Ledger& ledger, const chain::Transaction& tx,
                                 const chain::Block& block) {
  (void)block;
  if (tx.kind != "data") return;
  auto it = armed_ ? allocation_.find(tx.sender) : allocation_.end();
  if (it == allocation_.end()) {
    ledger.transfer(self_, tx.sender, tx.credits, "data_rejected_unknown", {});
    return;
  }
  Entry& entry = it->second;
  if (entry.submitted) {
    ledger.transfer(self_, tx.sender, tx.credits, "data_duplicate_ignored", {});
    return;
  }
  if (tx.submitted_at > task_deadline_) {
    ledger.transfer(self_, tx.sender, tx.credits, "data_rejected_late", {});
    return;
  }
  entry.submitted = true;
  digests_.push_back(tx.payload.value("digest", ""));
  if (tx.credits > 0) ledger.transfer(self_, isp_, tx.credits, "call_fee", {});
  ledger.transfer(self_, tx.sender, entry.payment + entry.deposit + entry.reimburse,
                  "worker_payment", {{"tasks", entry.task_ids.size()}});
  const bool all_in = std::all_of(allocation_.begin(), allocation_.end(),
                                  [](const auto& kv) { return kv.second.submitted; });
  if (all_in) complete_data(ledger);
}

void MUPContract::on_block(chain::Ledger& ledger, const chain::Block& block) {
  if (!armed_ || deadline_handled_ || block.mined_at < task_deadline_) return;
  deadline_handled_ = true;
  bool any_submitted = false;
  for (auto& [pseudonym, entry] : allocation_) {
    if (entry.submitted) {
      any_submitted = true;
      continue;
    }
    ++forfeited_;
    ledger.transfer(self_, isp_, entry.deposit, "deposit_forfeited", {});
    ledger.transfer(self_, isp_, entry.payment + entry.reimburse, "withheld_payment_returned", {});
  }
  if (any_submitted) complete_data(ledger);
}

AuctionInstance CSOPTContract::synthetic_instance() const {
  AuctionInstance inst;
  inst.tasks = tasks_;
  int synthetic_id = 0;
  for (const auto& [pseudonym, stored] : bids_) {  // map order = ascending pseudonym
    Bid bid;
    bid.user_id = synthetic_id++;
    bid.cost_per_task = stored.cost_per_task;
    bid.task_ids = stored.task_ids;
    inst.bids.push_back(std::move(bid));
  }
  return inst;
}

void CSOPTContract::on_transaction(chain::Ledger& ledger, const chain::Transaction& tx,
                                   const chain::Block& block) {
  (void)block;
  if (tx.kind == "bid") {
    if (finalized_) {
      ledger.transfer(self_, tx.sender, tx.credits, "bid_rejected_closed", {});
      return;
    }
    if (tx.submitted_at < open_) {
      ledger.transfer(self_, tx.sender, tx.credits, "bid_rejected_early", {});
      return;
    }
    if (tx.submitted_at > close_) {
      ledger.transfer(self_, tx.sender, tx.credits, "bid_rejected_late", {});
      return;
    }
    if (bids_.count(tx.sender)) {
      ledger.transfer(self_, tx.sender, tx.credits, "bid_rejected_duplicate", {});
      return;
    }
    if (tx.credits != deposit_ + call_fee_) {
      ledger.transfer(self_, tx.sender, tx.credits, "bid_rejected_bad_deposit", {});
      return;
    }
    StoredBid stored;
    stored.cost_per_task = parse_rational(tx.payload.at("cost").get<std::string>());
    stored.task_ids = tx.payload.at("task_ids").get<std::vector<int>>();
    bids_.emplace(tx.sender, std::move(stored));
    ledger.transfer(self_, isp_, call_fee_, "call_fee", {});
    return;
  }
  if (tx.kind == "finalize") finalize(ledger, tx);
}

void CSOPTContract::finalize(chain::Ledger& ledger, const chain::Transaction& tx) {
  if (finalized_) throw std::logic_error("auction finalized twice");
  finalized_ = true;

  const auto abort = [&](const char* note) {
    aborted_ = true;
    for (const auto& [pseudonym, stored] : bids_)
      ledger.transfer(self_, pseudonym, deposit_, "deposit_refund", {});
    if (tx.credits > 0) ledger.transfer(self_, isp_, tx.credits, "finalize_aborted", {{"note", note}});
  };

  if (bids_.empty()) {
    abort("no bids");
    return;
  }

  const AuctionInstance inst = synthetic_instance();
  AuctionOutcome outcome;
  try {
    outcome = run_csopt(inst, repeat_factor_);
  } catch (const InfeasibleInstance&) {
    abort("infeasible");
    return;
  } catch (const CompetitionViolation&) {
    abort("not enough competition");
    return;
  }

  std::vector<Address> order;
  order.reserve(bids_.size());
  for (const auto& [pseudonym, stored] : bids_) order.push_back(pseudonym);

  Credits required = 0;
  for (std::size_t id = 0; id < order.size(); ++id)
    if (outcome.assigned_count(static_cast<int>(id)) > 0)
      required += to_centi(outcome.payment(static_cast<int>(id))) + 2 * call_fee_;
  if (tx.credits != required) throw std::logic_error("finalize escrow does not match payments");

  std::map<Address, MUPContract::Entry> entries;
  Credits handoff = tx.credits;
  for (std::size_t id = 0; id < order.size(); ++id) {
    const Address& pseudonym = order[id];
    if (outcome.assigned_count(static_cast<int>(id)) == 0) {
      ++loser_count_;
      ledger.transfer(self_, pseudonym, deposit_, "deposit_refund", {});
      continue;
    }
    ++winner_count_;
    MUPContract::Entry entry;
    for (const TaskCopy& copy : outcome.assignments.at(static_cast<int>(id)))
      entry.task_ids.push_back(copy.task_id);
    entry.payment = to_centi(outcome.payment(static_cast<int>(id)));
    entry.reimburse = 2 * call_fee_;
    entry.deposit = deposit_;
    entries.emplace(pseudonym, std::move(entry));
    handoff += deposit_;
  }

  ledger.transfer(self_, mup_address_, handoff, "escrow_handoff",
                  {{"winners", winner_count_}});
  mup_->arm(std::move(entries), task_deadline_, to_centi(outcome.total_payment), blob_);
}

Coordinator::Coordinator(const ProtocolConfig& cfg)
    : cfg_(cfg), ledger_(cfg.timing.t_b, cfg.seed), registry_(cfg.seed ^ 0x9e3779b97f4a7c15ull) {
  isp_ = ledger_.create_account(chain::AccountKind::externally_owned, cfg_.isp_funding);
  csp_ = ledger_.create_account(chain::AccountKind::externally_owned, cfg_.csp_funding);
  ledger_.seal_supply();
}

AuctionReport Coordinator::run_auction(const AuctionInstance& inst, const ScriptOptions& opts) {
  const ProtocolTiming& t = cfg_.timing;
  const int auction_index = auctions_run_++;

  AuctionReport report;
  report.start = ledger_.now();
  report.formula_delay = end_to_end_delay(t);

  const SimTime t0 = report.start;
  const SimTime open = t0 + std::max(t.t_b, t.t_ann);
  const SimTime close = open + t.t_bidding;
  const SimTime announce = close + t.t_csopt;
  const SimTime task_deadline = announce + std::max(t.t_task, t.t_b) + 3 * t.t_b;
  const SimTime request_deadline =
      t0 + (opts.deadline ? *opts.deadline : 2 * report.formula_delay + 5 * t.t_b);

  const std::string blob =
      "sealed:owner=" + chain::to_hex(csp_).substr(0, 16) + ":auction=" + std::to_string(auction_index);

  const Address rr_addr = ledger_.create_account(chain::AccountKind::contract, 0);
  const Address da_addr = ledger_.create_account(chain::AccountKind::contract, 0);
  const Address mup_addr = ledger_.create_account(chain::AccountKind::contract, 0);
  const Address csopt_addr = ledger_.create_account(chain::AccountKind::contract, 0);

  auto rr = std::make_shared<RRContract>(rr_addr, csp_, isp_, request_deadline);
  auto da = std::make_shared<DAContract>(da_addr, csp_, isp_);
  auto mup = std::make_shared<MUPContract>(mup_addr, isp_, cfg_.call_fee, rr, da, da_addr);
  auto csopt = std::make_shared<CSOPTContract>(csopt_addr, isp_, open, close, cfg_.deposit,
                                               cfg_.call_fee, cfg_.repeat_factor, inst.tasks, mup,
                                               mup_addr, task_deadline, blob);
  ledger_.attach_contract(rr_addr, rr);
  ledger_.attach_contract(da_addr, da);
  ledger_.attach_contract(mup_addr, mup);
  ledger_.attach_contract(csopt_addr, csopt);

  if (csp_balance() < cfg_.registration_fee) throw chain::InsufficientBalance();
  ledger_.submit({csp_, rr_addr, cfg_.registration_fee, "register_request",
                  {{"tasks", inst.tasks.size()}, {"deadline", chain::to_seconds(request_deadline)}},
                  t0});

  // Temporary on-chain identities, funded by the ISP so no real account is
  // ever linked to a user.
  std::map<int, Address> pseudonym_of;
  const Credits funding = cfg_.deposit + 2 * cfg_.call_fee;
  if (isp_balance() < funding * static_cast<Credits>(inst.bids.size()))
    throw chain::InsufficientBalance();
  for (const Bid& bid : inst.bids) {
    const Address ps = registry_.issue(auction_index, bid.user_id);
    ledger_.create_account_at(ps, chain::AccountKind::externally_owned, 0);
    pseudonym_of[bid.user_id] = ps;
    report.pseudonyms.push_back(ps);
    ledger_.submit({isp_, ps, funding, "pseudonym_funding", {}, t0});
  }

  std::vector<const Bid*> accepted;
  if (!opts.omit_all_bids) {
    for (const Bid& bid : inst.bids) {
      const Address ps = pseudonym_of.at(bid.user_id);
      auto rng = substream(cfg_.seed, 1000 + static_cast<std::uint32_t>(auction_index),
                           static_cast<std::uint32_t>(bid.user_id));
      const SimTime jitter =
          t.t_bidding >= 2 ? static_cast<SimTime>(uniform_u64(
                                 rng, 0, static_cast<std::uint64_t>(t.t_bidding / 2)))
                           : 0;
      const bool late = opts.late_bidder && *opts.late_bidder == bid.user_id;
      const SimTime when = late ? close + t.t_b : open + jitter;
      const nlohmann::json payload{{"cost", to_string(bid.cost_per_task)},
                                   {"task_ids", bid.task_ids}};
      ledger_.submit({ps, csopt_addr, cfg_.deposit + cfg_.call_fee, "bid", payload, when});
      if (opts.duplicate_bidder && *opts.duplicate_bidder == bid.user_id && !late)
        ledger_.submit({ps, csopt_addr, cfg_.deposit + cfg_.call_fee, "bid", payload,
                        std::min(close, when + std::max<SimTime>(1, t.t_bidding / 4))});
      if (!late) accepted.push_back(&bid);
    }
  }

  // Off-chain mirror of the auction the contract will run, to size the escrow
  // and know which pseudonyms must submit data.
  std::map<Address, const Bid*> by_pseudonym;
  for (const Bid* bid : accepted) by_pseudonym[pseudonym_of.at(bid->user_id)] = bid;
  AuctionInstance synthetic;
  synthetic.tasks = inst.tasks;
  std::vector<const Bid*> ranked;
  for (const auto& [ps, bid] : by_pseudonym) {
    Bid synthetic_bid = *bid;
    synthetic_bid.user_id = static_cast<int>(ranked.size());
    synthetic.bids.push_back(std::move(synthetic_bid));
    ranked.push_back(bid);
  }

  Credits escrow = 0;
  std::vector<const Bid*> winners;
  bool priced = false;
  AuctionOutcome outcome;
  if (!synthetic.bids.empty()) {
    try {
      outcome = run_csopt(synthetic, cfg_.repeat_factor);
      priced = true;
    } catch (const InfeasibleInstance&) {
    } catch (const CompetitionViolation&) {
    }
  }
  if (priced) {
    for (std::size_t id = 0; id < ranked.size(); ++id) {
      if (outcome.assigned_count(static_cast<int>(id)) == 0) continue;
      winners.push_back(ranked[id]);
      const Credits payment = to_centi(outcome.payment(static_cast<int>(id)));
      escrow += payment + 2 * cfg_.call_fee;
      report.payment_by_user[ranked[id]->user_id] = payment;
    }
  }
  if (isp_balance() < escrow) throw chain::InsufficientBalance();
  ledger_.submit({isp_, csopt_addr, escrow, "finalize", {}, announce});

  const SimTime allocation_block = next_block_after(announce, t.t_b);
  ledger_.mine_until(allocation_block);

  for (const Bid* winner : winners) {
    if (std::find(opts.silent_users.begin(), opts.silent_users.end(), winner->user_id) !=
        opts.silent_users.end())
      continue;
    const Address ps = pseudonym_of.at(winner->user_id);
    const SimTime when = std::max(announce + t.t_task, allocation_block);
    const std::string digest =
        hex64(chain::fnv1a64("reading:" + chain::to_hex(ps) + ":" + std::to_string(auction_index)));
    ledger_.submit({ps, mup_addr, cfg_.call_fee, "data", {{"digest", digest}}, when});
  }

  ledger_.mine_until(task_deadline + 2 * t.t_b);

  SimTime completed = -1;
  for (const chain::Block& block : ledger_.blocks()) {
    if (block.mined_at <= t0) continue;
    for (const chain::Transaction& tx : block.transactions)
      if (tx.kind == "worker_payment" && tx.sender == mup_addr)
        completed = std::max(completed, block.mined_at);
  }
  report.completed_relative = completed < 0 ? -1 : completed - t0;

  if (da->ready() && opts.purchase_data) {
    if (csp_balance() < da->price()) throw chain::InsufficientBalance();
    ledger_.submit({csp_, da_addr, da->price(), "access_data", {}, ledger_.now()});
    ledger_.mine_until(ledger_.now() + 2 * t.t_b);
  }

  ledger_.mine_until(std::max(ledger_.now(), request_deadline) + 2 * t.t_b);

  report.conserved = ledger_.conserved();
  report.aborted = csopt->aborted();
  report.rr_refunded = rr->refunded();
  report.rr_settled = rr->settled();
  report.da_created = da->ready();
  report.da_price = da->price();
  report.access_granted = da->access_granted();
  report.blob = da->delivered();
  report.winners = csopt->winner_count();
  report.losers = csopt->loser_count();
  report.forfeited = mup->forfeited();
  for (const auto& [user_id, ps] : pseudonym_of)
    report.final_balance_by_user[user_id] = ledger_.balance(ps);
  return report;
}

}  // namespace crowdsense::protocol
