#pragma once

#include <stdexcept>
#include <string>

namespace attn {

// Bad inputs or a request that is undefined for the given parameters.
// CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine failed to deliver its advertised guarantee.
// CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Immediate action dominates every learning policy; experimentation
// boundaries do not exist for these parameters.
struct ExpViolated : ValidationError {
  explicit ExpViolated(const std::string& what) : ValidationError(what) {}
};

// Root bracketing lost: the two candidate values never cross on the
// search interval.
struct BracketingFailure : NumericalError {
  explicit BracketingFailure(const std::string& what) : NumericalError(what) {}
};

// Pointwise derivative requested exactly at a kink of the value envelope;
// use the two-sided query instead.
struct KinkPoint : ValidationError {
  explicit KinkPoint(const std::string& what) : ValidationError(what) {}
};

// Posterior requested for a signal that has probability zero.
struct DegenerateSignal : ValidationError {
  explicit DegenerateSignal(const std::string& what) : ValidationError(what) {}
};

// Deterministic belief flow never reaches the requested target.
struct Unreachable : ValidationError {
  explicit Unreachable(const std::string& what) : ValidationError(what) {}
};

// Malformed population specification.
struct InvalidSpec : ValidationError {
  explicit InvalidSpec(const std::string& what) : ValidationError(what) {}
};

// Polarization is undefined when one half of the belief space carries no mass.
struct EmptyHalf : ValidationError {
  explicit EmptyHalf(const std::string& what) : ValidationError(what) {}
};

// Middle actions supplied in an order that breaks the required monotone
// payoff structure.
struct OrderingViolation : ValidationError {
  explicit OrderingViolation(const std::string& what) : ValidationError(what) {}
};

// Attention frontier fails a structural requirement (endpoints, monotonicity,
// strict concavity, involution).
struct AssumptionViolated : ValidationError {
  explicit AssumptionViolated(const std::string& what) : ValidationError(what) {}
};

// Frontier curvature vanishes at the symmetric point: the saddle construction
// for the opposite-biased policy has no transverse direction.
struct SaddleDegenerate : ValidationError {
  explicit SaddleDegenerate(const std::string& what) : ValidationError(what) {}
};

// Config file / flag parsing failure.
struct ParseError : ValidationError {
  explicit ParseError(const std::string& what) : ValidationError(what) {}
};

}  // namespace attn
