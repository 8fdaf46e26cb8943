#pragma once

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace crowdsense::chain {

/// Simulated time in integer microseconds and balances in integer 0.01-credit
/// units: block arithmetic and escrow accounting stay exact.
using SimTime = std::int64_t;
using Credits = std::int64_t;
using Address = std::array<std::uint8_t, 64>;

SimTime from_seconds(double seconds);
double to_seconds(SimTime t);

std::string to_hex(const Address& address);
std::uint64_t fnv1a64(std::string_view bytes);

enum class AccountKind { externally_owned, contract };

struct Account {
  Address address{};
  Credits balance = 0;
  AccountKind kind = AccountKind::externally_owned;
};

struct Transaction {
  Address sender{};
  Address destination{};
  Credits credits = 0;
  std::string kind;        // e.g. "bid", "data", "deposit_refund"
  nlohmann::json payload;  // must never mention a real user id
  SimTime submitted_at = 0;
  std::uint64_t sequence = 0;  // ties within a timestamp keep submission order
};

struct Block {
  std::int64_t height = 0;
  SimTime mined_at = 0;
  std::vector<Transaction> transactions;
};

class Ledger;

/// A contract account's behavior: reacts to transactions addressed to it and
/// to every mined block (deadline triggers). Both hooks may move credits via
/// Ledger::transfer, which lands in the block being mined.
class Contract {
 public:
  virtual ~Contract() = default;
  virtual void on_transaction(Ledger& ledger, const Transaction& tx, const Block& block) = 0;
  virtual void on_block(Ledger& ledger, const Block& block) { (void)ledger, (void)block; }
};

struct InsufficientBalance : std::runtime_error {
  InsufficientBalance() : std::runtime_error("sender balance below transaction credits") {}
};

/// Blocks are produced at exact multiples of the block interval; a transaction
/// submitted at time t lands in the first block mined strictly after t, and
/// transactions execute in submission order. Total credits are checked against
/// the post-setup snapshot after every block.
class Ledger {
 public:
  Ledger(SimTime block_interval, std::uint64_t seed);

  Address create_account(AccountKind kind, Credits initial_balance);

  /// Account at a caller-chosen address (e.g. a registry-issued pseudonym).
  void create_account_at(const Address& address, AccountKind kind, Credits initial_balance);

  void attach_contract(const Address& address, std::shared_ptr<Contract> contract);

  /// Queues a transaction; balance is enforced at inclusion time.
  void submit(Transaction tx);

  /// Mines every block due at or before t; returns the chain height reached.
  std::int64_t mine_until(SimTime t);

  /// Immediate transfer inside the block being mined (contract hooks only).
  void transfer(const Address& from, const Address& to, Credits credits, std::string kind,
                nlohmann::json payload);

  /// Freezes the conservation baseline; call once setup funding is done.
  void seal_supply();

  Credits balance(const Address& address) const;
  Credits total_credits() const;
  bool conserved() const { return conserved_; }
  SimTime now() const { return now_; }
  SimTime block_interval() const { return block_interval_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::mt19937_64& rng() { return rng_; }

  /// Fresh unique nonzero 64-byte address drawn from the ledger RNG.
  Address random_address();

  /// One JSON line per included transaction:
  /// height, time, sender, destination, credits, kind, payload_digest.
  void write_trace(std::ostream& out) const;
  std::string trace_text() const;

 private:
  void execute(const Transaction& tx, Block& block);

  SimTime block_interval_;
  SimTime now_ = 0;
  std::mt19937_64 rng_;
  std::map<Address, Account> accounts_;
  std::map<Address, std::shared_ptr<Contract>> contracts_;
  std::vector<Transaction> mempool_;
  std::vector<Block> blocks_;
  std::uint64_t next_sequence_ = 0;
  std::optional<Credits> sealed_supply_;
  bool conserved_ = true;
  Block* mining_ = nullptr;
};

}  // namespace crowdsense::chain
