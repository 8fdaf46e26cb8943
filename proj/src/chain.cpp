#include "crowdsense/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

namespace crowdsense::chain {

SimTime from_seconds(double seconds) {
  return static_cast<SimTime>(std::llround(seconds * 1e6));
}

double to_seconds(SimTime t) { return static_cast<double>(t) / 1e6; }

std::string to_hex(const Address& address) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(address.size() * 2);
  for (std::uint8_t byte : address) {
    out.push_back(digits[byte >> 4]);
    out.push_back(digits[byte & 0xf]);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

Ledger::Ledger(SimTime block_interval, std::uint64_t seed)
    : block_interval_(block_interval), rng_(seed) {
  if (block_interval_ <= 0) throw std::invalid_argument("block interval must be positive");
}

Address Ledger::random_address() {
  while (true) {
    Address address;
    for (std::size_t i = 0; i < address.size(); i += 8) {
      const std::uint64_t word = rng_();
      for (std::size_t b = 0; b < 8; ++b)
        address[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
    }
    const bool zero = std::all_of(address.begin(), address.end(), [](auto b) { return b == 0; });
    if (!zero && !accounts_.count(address)) return address;
  }
}

Address Ledger::create_account(AccountKind kind, Credits initial_balance) {
  const Address address = random_address();
  create_account_at(address, kind, initial_balance);
  return address;
}

void Ledger::create_account_at(const Address& address, AccountKind kind,
                               Credits initial_balance) {
  if (initial_balance < 0) throw std::invalid_argument("negative initial balance");
  if (sealed_supply_ && initial_balance != 0)
    throw std::logic_error("cannot mint credits after the supply is sealed");
  if (accounts_.count(address)) throw std::invalid_argument("address already in use");
  accounts_[address] = Account{address, initial_balance, kind};
}

void Ledger::attach_contract(const Address& address, std::shared_ptr<Contract> contract) {
  auto it = accounts_.find(address);
  if (it == accounts_.end() || it->second.kind != AccountKind::contract)
    throw std::invalid_argument("not a contract account");
  contracts_[address] = std::move(contract);
}

void Ledger::submit(Transaction tx) {
  if (tx.credits < 0) throw std::invalid_argument("negative transaction credits");
  if (!accounts_.count(tx.sender) || !accounts_.count(tx.destination))
    throw std::invalid_argument("transaction references unknown account");
  if (tx.submitted_at < now_) throw std::invalid_argument("transaction submitted in the past");
  tx.sequence = next_sequence_++;
  mempool_.push_back(std::move(tx));
}

void Ledger::seal_supply() { sealed_supply_ = total_credits(); }

Credits Ledger::balance(const Address& address) const {
  auto it = accounts_.find(address);
  if (it == accounts_.end()) throw std::invalid_argument("unknown account");
  return it->second.balance;
}

Credits Ledger::total_credits() const {
  Credits total = 0;
  for (const auto& [address, account] : accounts_) total += account.balance;
  return total;
}

void Ledger::transfer(const Address& from, const Address& to, Credits credits, std::string kind,
                      nlohmann::json payload) {
  if (!mining_) throw std::logic_error("transfer outside block execution");
  Transaction tx;
  tx.sender = from;
  tx.destination = to;
  tx.credits = credits;
  tx.kind = std::move(kind);
  tx.payload = std::move(payload);
  tx.submitted_at = mining_->mined_at;
  tx.sequence = next_sequence_++;
  execute(tx, *mining_);
}

void Ledger::execute(const Transaction& tx, Block& block) {
  Account& sender = accounts_.at(tx.sender);
  Account& destination = accounts_.at(tx.destination);
  if (tx.credits > sender.balance) throw InsufficientBalance();
  sender.balance -= tx.credits;
  destination.balance += tx.credits;
  block.transactions.push_back(tx);

  // Dispatch with the caller's stable copy: nested transfers grow
  // block.transactions, so references into it would dangle.
  auto contract = contracts_.find(tx.destination);
  if (contract != contracts_.end()) contract->second->on_transaction(*this, tx, block);
}

std::int64_t Ledger::mine_until(SimTime t) {
  while (now_ + block_interval_ <= t) {
    Block block;
    block.height = static_cast<std::int64_t>(blocks_.size()) + 1;
    block.mined_at = now_ + block_interval_;

    std::vector<Transaction> due, rest;
    for (Transaction& tx : mempool_)
      (tx.submitted_at < block.mined_at ? due : rest).push_back(std::move(tx));
    mempool_ = std::move(rest);
    std::sort(due.begin(), due.end(), [](const Transaction& a, const Transaction& b) {
      return std::tie(a.submitted_at, a.sequence) < std::tie(b.submitted_at, b.sequence);
    });

    mining_ = &block;
    for (const Transaction& tx : due) execute(tx, block);
    for (auto& [address, contract] : contracts_) contract->on_block(*this, block);
    mining_ = nullptr;

    now_ = block.mined_at;
    blocks_.push_back(std::move(block));
    if (sealed_supply_ && total_credits() != *sealed_supply_) conserved_ = false;
  }
  return static_cast<std::int64_t>(blocks_.size());
}

void Ledger::write_trace(std::ostream& out) const {
  for (const Block& block : blocks_) {
    for (const Transaction& tx : block.transactions) {
      char digest[32];
      std::snprintf(digest, sizeof digest, "%016llx",
                    static_cast<unsigned long long>(fnv1a64(tx.payload.dump())));
      nlohmann::json line{{"height", block.height},        {"time", to_seconds(block.mined_at)},
                          {"sender", to_hex(tx.sender)},   {"destination", to_hex(tx.destination)},
                          {"credits", tx.credits},         {"kind", tx.kind},
                          {"payload_digest", digest}};
      out << line.dump() << "\n";
    }
  }
}

std::string Ledger::trace_text() const {
  std::ostringstream out;
  write_trace(out);
  return out.str();
}

}  // namespace crowdsense::chain
