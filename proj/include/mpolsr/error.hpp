#ifndef MPOLSR_ERROR_HPP
#define MPOLSR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mpolsr {

/// Base of every error raised by this library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A caller handed in something that violates an operation's precondition.
class InputError : public Error
{
public:
  using Error::Error;
};

/// The destination cannot be reached over the current topology view.
class RouteNotFound : public Error
{
public:
  using Error::Error;
};

/// A configuration value is missing, malformed or inconsistent.
/// `field()` names the offending key when one is known.
class ConfigError : public Error
{
public:
  ConfigError(std::string field, const std::string& what)
    : Error(field.empty() ? what : field + ": " + what)
    , m_field(std::move(field))
  {
  }

  const std::string& field() const noexcept { return m_field; }

private:
  std::string m_field;
};

class CodecError : public Error
{
public:
  using Error::Error;
};

class InsufficientDescriptions : public CodecError
{
public:
  using CodecError::CodecError;
};

/// Inversion stalled or produced out-of-range symbols.
class ReconstructionFailure : public CodecError
{
public:
  using CodecError::CodecError;
};

/// Descriptions that do not belong together were combined.
class DescriptionMismatch : public CodecError
{
public:
  using CodecError::CodecError;
};

} // namespace mpolsr

#endif
