#pragma once

#include <stdexcept>
#include <string>

namespace pathauth {

/// Caller broke an operation's precondition (bad index, wrong event kind, mixed keys).
struct UsageError : std::logic_error {
    using std::logic_error::logic_error;
};

/// The active adversary model does not grant the requested capability.
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A tag write would exceed the tag's memory.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Authenticated decryption or signature check failed.
struct AuthenticationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Verification requested from an entity the protocol does not allow to verify.
struct VerifierPolicyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exhaustive search parameters outside the supported bounds.
struct BoundedSearchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Privacy game requested against a protocol that exposes nothing to observe.
struct UnsupportedGameError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace pathauth
