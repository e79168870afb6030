#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sparsekit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ZeroColumn : public Error {
public:
    explicit ZeroColumn(int column)
        : Error("column " + std::to_string(column + 1) + " has (near) zero norm"), column_(column) {}
    /// Zero-based column index.
    int column() const noexcept { return column_; }

private:
    int column_;
};

class KTooLarge : public Error {
public:
    KTooLarge(long requested, long limit)
        : Error("requested " + std::to_string(requested) + " indices but only " +
                std::to_string(limit) + " are allowed"),
          requested_(requested), limit_(limit) {}
    long requested() const noexcept { return requested_; }
    long limit() const noexcept { return limit_; }

private:
    long requested_;
    long limit_;
};

class RankDeficient : public Error {
public:
    RankDeficient(long rank, long columns)
        : Error("restricted matrix has rank " + std::to_string(rank) + " < " +
                std::to_string(columns) + " columns"),
          rank_(rank), columns_(columns) {}
    long rank() const noexcept { return rank_; }
    long columns() const noexcept { return columns_; }

private:
    long rank_;
    long columns_;
};

class BudgetExceeded : public Error {
public:
    BudgetExceeded(std::uint64_t required, std::uint64_t budget)
        : Error("enumeration needs " + std::to_string(required) + " subsets, budget is " +
                std::to_string(budget)),
          required_(required), budget_(budget) {}
    std::uint64_t required() const noexcept { return required_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t required_;
    std::uint64_t budget_;
};

class EmptyGroup : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace sparsekit

namespace sparsekit {

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sparsekit
