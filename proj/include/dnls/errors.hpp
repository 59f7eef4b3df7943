#pragma once

#include <stdexcept>

namespace dnls
{
/// Raised when a caller violates an operation's precondition (bad site,
/// mismatched boxes, invalid exponent, unknown config key, ...).
class UsageError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace dnls
