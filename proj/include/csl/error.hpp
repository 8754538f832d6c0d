#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace csl {

enum class ErrorKind {
    empty_input,
    insufficient_data,
    domain,
    alignment,
    estimation_failure,
    capacity,
    degenerate_graph,
    config,
    parse,
    io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Raised when the optimizer hits its iteration cap. Carries the best point found
// (natural parameters) and its log-likelihood.
class EstimationFailure : public Error {
public:
    EstimationFailure(const std::string& what, std::vector<double> best, double best_loglik)
        : Error(ErrorKind::estimation_failure, what), best_(std::move(best)), best_loglik_(best_loglik) {}

    const std::vector<double>& best_point() const noexcept { return best_; }
    double best_loglik() const noexcept { return best_loglik_; }

private:
    std::vector<double> best_;
    double best_loglik_;
};

} // namespace csl
