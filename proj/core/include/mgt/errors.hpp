#pragma once

#include <stdexcept>
#include <string>

namespace mgt {

// All library errors derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class UnknownPoint : public Error {
public:
  using Error::Error;
};

class InvalidSpec : public Error {
public:
  using Error::Error;
};

class DegenerateGrid : public Error {
public:
  using Error::Error;
};

class TooManyPoints : public Error {
public:
  using Error::Error;
};

class EmptyInput : public Error {
public:
  using Error::Error;
};

class RadiusTooSmall : public Error {
public:
  using Error::Error;
};

class OutOfDomain : public Error {
public:
  using Error::Error;
};

class EmptyField : public Error {
public:
  using Error::Error;
};

class NonComponentTarget : public Error {
public:
  using Error::Error;
};

class NonCubeDomain : public Error {
public:
  using Error::Error;
};

class DepthTooDeep : public Error {
public:
  using Error::Error;
};

class NoFullRankMinor : public Error {
public:
  using Error::Error;
};

class ChartShrunkToGrid : public Error {
public:
  using Error::Error;
};

class InvalidLambda : public Error {
public:
  using Error::Error;
};

class InvalidDims : public Error {
public:
  using Error::Error;
};

// Config parsing keeps the offending file/line/field in the message.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace mgt
