#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace znlab {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Flat vector had to be expanded into more entries than the budget allows.
class EntryBudgetExceeded : public error {
 public:
  EntryBudgetExceeded(std::uint64_t requested, std::uint64_t budget)
      : error("densification needs " + std::to_string(requested) +
              " entries, budget is " + std::to_string(budget)),
        requested_(requested),
        budget_(budget) {}

  std::uint64_t requested() const noexcept { return requested_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t requested_;
  std::uint64_t budget_;
};

class OrderMismatch : public error {
 public:
  using error::error;
};

class EmptyWitnessSet : public error {
 public:
  EmptyWitnessSet() : error("witness set is empty") {}
};

class ToleranceNotReached : public error {
 public:
  using error::error;
};

class BlockOverlap : public error {
 public:
  using error::error;
};

class ZeroVectorInFamily : public error {
 public:
  explicit ZeroVectorInFamily(std::size_t position)
      : error("family member " + std::to_string(position) + " has zero norm"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class ConfigInvalid : public error {
 public:
  using error::error;
};

class RowNotFound : public error {
 public:
  using error::error;
};

/// Malformed input that none of the specific errors above describes.
class InvalidArgument : public error {
 public:
  using error::error;
};

}  // namespace znlab
