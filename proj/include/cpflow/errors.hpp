#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cpflow
{

/** Base class for every error raised by the library. */
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Complex construction
class NonManifoldError : public Error { public: using Error::Error; };
class BadFaceError : public Error { public: using Error::Error; };
class DisconnectedLinkError : public Error { public: using Error::Error; };

/** Argument outside the mathematical domain of a formula (e.g. arcosh < 1). */
class DomainError : public Error { public: using Error::Error; };

/** Radius or length large enough that cosh/sinh would overflow. */
class RangeError : public Error { public: using Error::Error; };

/** Derivative requested on or outside the triangle-inequality boundary. */
class BoundaryError : public Error { public: using Error::Error; };

/** Classical curvature requested for a metric outside the admissible space. */
class NotInOmegaError : public Error
{
public:
    NotInOmegaError(std::string msg, std::vector<std::size_t> faces)
        : Error(std::move(msg)), faces_(std::move(faces))
    {
    }
    const std::vector<std::size_t>& faces() const noexcept { return faces_; }

private:
    std::vector<std::size_t> faces_;
};

class ConfigError : public Error { public: using Error::Error; };
class StepError : public Error { public: using Error::Error; };
class QuadratureError : public Error { public: using Error::Error; };
class NotFoundError : public Error { public: using Error::Error; };

/** Malformed input file. */
class ParseError : public Error { public: using Error::Error; };

}  // namespace cpflow
