#pragma once

#include "crowdsense/auction_types.hpp"
#include "crowdsense/chain.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace crowdsense::protocol {

using chain::Address;
using chain::Credits;
using chain::SimTime;

struct ProtocolTiming {
  SimTime t_b = chain::from_seconds(1.0);        // block interval
  SimTime t_ann = chain::from_seconds(2.0);      // task announcement
  SimTime t_bidding = chain::from_seconds(5.0);  // bidding window length
  SimTime t_csopt = chain::from_seconds(1.0);    // auction computation
  SimTime t_task = chain::from_seconds(10.0);    // task execution
};

/// Closed-form request-to-data delay:
/// max(t_b, t_ann) + t_bidding + t_csopt + max(t_b, t_task) + t_b.
SimTime end_to_end_delay(const ProtocolTiming& t);

struct ProtocolConfig {
  ProtocolTiming timing;
  Credits deposit = 10 * 100;            // participation deposit, 0.01-credit units
  Credits registration_fee = 100 * 100;  // CSP request fee
  Credits call_fee = 1 * 100;            // flat per-contract-call fee, reimbursed to winners
  int repeat_factor = 1;
  std::uint64_t seed = 1;
  Credits csp_funding = 500'000'00;
  Credits isp_funding = 500'000'00;
};

/// Fresh 64-byte identities. Injective across everything it ever issued;
/// the real-user mapping stays on the coordinator side and never reaches
/// the chain.
class PseudonymRegistry {
 public:
  explicit PseudonymRegistry(std::uint64_t master_seed);
  Address issue(int auction_index, int user_id);
  std::optional<int> real_user(int auction_index, const Address& pseudonym) const;
  const std::vector<Address>& issued() const { return issued_; }

 private:
  std::mt19937_64 rng_;
  std::set<Address> used_;
  std::vector<Address> issued_;
  std::map<std::pair<int, int>, Address> by_auction_user_;
  std::map<Address, std::pair<int, int>> reverse_;
};

/// Request registration: escrows the CSP's fee and, at the deadline, either
/// settles it to the ISP (data delivered) or refunds the CSP.
class RRContract : public chain::Contract {
 public:
  RRContract(Address self, Address csp, Address isp, SimTime deadline)
      : self_(self), csp_(csp), isp_(isp), deadline_(deadline) {}
  void on_transaction(chain::Ledger& ledger, const chain::Transaction& tx,
                      const chain::Block& block) override;
  void on_block(chain::Ledger& ledger, const chain::Block& block) override;
  void set_data(const Address& da, const std::string& digest);

  bool settled() const { return settled_; }
  bool refunded() const { return refunded_; }
  std::optional<Address> da_address() const { return da_address_; }

 private:
  Address self_, csp_, isp_;
  SimTime deadline_;
  Credits escrow_ = 0;
  std::optional<Address> da_address_;
  std::optional<std::string> data_digest_;
  bool settled_ = false;
  bool refunded_ = false;
};

/// Data access: holds the sealed result blob and releases it only to the
/// owning CSP once the full price (the auction's total payment) is paid.
class DAContract : public chain::Contract {
 public:
  DAContract(Address self, Address owner_csp, Address isp)
      : self_(self), owner_(owner_csp), isp_(isp) {}
  void arm(Credits price, std::string sealed_blob);
  void on_transaction(chain::Ledger& ledger, const chain::Transaction& tx,
                      const chain::Block& block) override;

  bool ready() const { return ready_; }
  Credits price() const { return price_; }
  bool access_granted() const { return !access_log_.empty(); }
  const std::optional<std::string>& delivered() const { return delivered_; }

 private:
  Address self_, owner_, isp_;
  bool ready_ = false;
  Credits price_ = 0;
  std::string blob_;
  std::vector<Address> access_log_;
  std::optional<std::string> delivered_;
};

/// Mobile user payment: holds winners' deposits and the payment escrow, pays
/// each winner on a valid data submission, forfeits deposits of silent
/// winners at the task deadline, and prices the DA once data is in.
class MUPContract : public chain::Contract {
 public:
  struct Entry {
    std::vector<int> task_ids;
    Credits payment = 0;
    Credits reimburse = 0;  // call fees returned on top of the payment
    Credits deposit = 0;
    bool submitted = false;
  };

  MUPContract(Address self, Address isp, Credits call_fee,
              std::shared_ptr<RRContract> rr, std::shared_ptr<DAContract> da, Address da_address)
      : self_(self), isp_(isp), call_fee_(call_fee), rr_(std::move(rr)), da_(std::move(da)),
        da_address_(da_address) {}

  void arm(std::map<Address, Entry> allocation, SimTime task_deadline,
           Credits total_payment, std::string blob);
  void on_transaction(chain::Ledger& ledger, const chain::Transaction& tx,
                      const chain::Block& block) override;
  void on_block(chain::Ledger& ledger, const chain::Block& block) override;

  bool armed() const { return armed_; }
  int forfeited() const { return forfeited_; }
  bool data_complete() const { return da_ready_; }
  const std::map<Address, Entry>& allocation() const { return allocation_; }

 private:
  void complete_data(chain::Ledger& ledger);

  Address self_, isp_;
  Credits call_fee_;
  std::shared_ptr<RRContract> rr_;
  std::shared_ptr<DAContract> da_;
  Address da_address_;
  bool armed_ = false;
  SimTime task_deadline_ = 0;
  std::map<Address, Entry> allocation_;
  std::vector<std::string> digests_;
  Credits total_payment_ = 0;
  std::string blob_;
  bool da_ready_ = false;
  bool deadline_handled_ = false;
  int forfeited_ = 0;
};

/// Auction contract: collects deposits and sealed-by-pseudonym bids inside the
/// bidding window, then on the finalize call runs the allocation and payment
/// rules over synthetic bidder ids (pseudonym rank), refunds the losers, and
/// hands winners' deposits plus the payment escrow to MUP.
class CSOPTContract : public chain::Contract {
 public:
  CSOPTContract(Address self, Address isp, SimTime open, SimTime close, Credits deposit,
                Credits call_fee, int repeat_factor, std::vector<Task> tasks,
                std::shared_ptr<MUPContract> mup, Address mup_address, SimTime task_deadline,
                std::string blob)
      : self_(self), isp_(isp), open_(open), close_(close), deposit_(deposit),
        call_fee_(call_fee), repeat_factor_(repeat_factor), tasks_(std::move(tasks)),
        mup_(std::move(mup)), mup_address_(mup_address), task_deadline_(task_deadline),
        blob_(std::move(blob)) {}

  void on_transaction(chain::Ledger& ledger, const chain::Transaction& tx,
                      const chain::Block& block) override;

  bool finalized() const { return finalized_; }
  bool aborted() const { return aborted_; }
  int accepted_bids() const { return static_cast<int>(bids_.size()); }
  int winner_count() const { return winner_count_; }
  int loser_count() const { return loser_count_; }

  /// The instance the contract will price, over synthetic ids 0..m-1 assigned
  /// by ascending pseudonym; exposed so the coordinator can size the escrow.
  AuctionInstance synthetic_instance() const;

 private:
  struct StoredBid {
    Rational cost_per_task;
    std::vector<int> task_ids;
  };

  void finalize(chain::Ledger& ledger, const chain::Transaction& tx);

  Address self_, isp_;
  SimTime open_, close_;
  Credits deposit_, call_fee_;
  int repeat_factor_;
  std::vector<Task> tasks_;
  std::shared_ptr<MUPContract> mup_;
  Address mup_address_;
  SimTime task_deadline_;
  std::string blob_;
  std::map<Address, StoredBid> bids_;
  bool finalized_ = false;
  bool aborted_ = false;
  int winner_count_ = 0;
  int loser_count_ = 0;
};

struct ScriptOptions {
  bool omit_all_bids = false;          // nobody bids: the request must refund at its deadline
  std::vector<int> silent_users;       // winners that never submit data
  std::optional<int> late_bidder;      // this user's bid arrives after the window closes
  std::optional<int> duplicate_bidder; // this user bids twice inside the window
  std::optional<SimTime> deadline;     // RR deadline relative to the auction start
  bool purchase_data = true;           // CSP buys the result once it is priced
};

struct AuctionReport {
  SimTime start = 0;
  SimTime formula_delay = 0;
  SimTime completed_relative = -1;  // last worker payment block, -1 when none
  bool conserved = false;
  bool aborted = false;
  bool rr_refunded = false;
  bool rr_settled = false;
  bool da_created = false;
  bool access_granted = false;
  Credits da_price = 0;
  std::optional<std::string> blob;
  int winners = 0;
  int losers = 0;
  int forfeited = 0;
  std::map<int, Credits> payment_by_user;       // real user id -> auction payment (centi)
  std::map<int, Credits> final_balance_by_user; // real user id -> pseudonym balance at the end
  std::vector<Address> pseudonyms;
};

/// Drives scripted request/auction/submission runs over one shared ledger and
/// pseudonym registry; repeated calls chain auctions back to back.
class Coordinator {
 public:
  explicit Coordinator(const ProtocolConfig& cfg);

  AuctionReport run_auction(const AuctionInstance& inst, const ScriptOptions& opts = {});

  chain::Ledger& ledger() { return ledger_; }
  const PseudonymRegistry& registry() const { return registry_; }
  Credits csp_balance() const { return ledger_.balance(csp_); }
  Credits isp_balance() const { return ledger_.balance(isp_); }

 private:
  ProtocolConfig cfg_;
  chain::Ledger ledger_;
  PseudonymRegistry registry_;
  Address isp_{}, csp_{};
  int auctions_run_ = 0;
};

}  // namespace crowdsense::protocol
