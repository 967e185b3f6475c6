// errors.hpp
// Exception hierarchy shared by every qde module.
//
// Each error carries a stable name() so the CLI can print the structured
// error kind and map it onto an exit code.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qde {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* name() const noexcept { return "Error"; }
    /// Numerical failures map to CLI exit code 3, input problems to 2.
    virtual bool numerical() const noexcept { return false; }
};

#define QDE_DEFINE_ERROR(Name, Base, IsNumerical)                               \
    class Name : public Base {                                                  \
    public:                                                                     \
        using Base::Base;                                                       \
        const char* name() const noexcept override { return #Name; }            \
        bool numerical() const noexcept override { return IsNumerical; }        \
    };

QDE_DEFINE_ERROR(DomainError, Error, true)
QDE_DEFINE_ERROR(DimensionMismatch, Error, false)
QDE_DEFINE_ERROR(NonSquare, Error, false)
QDE_DEFINE_ERROR(StructureError, Error, true)
QDE_DEFINE_ERROR(SingularMatrix, Error, true)
QDE_DEFINE_ERROR(ConvergenceError, Error, true)
QDE_DEFINE_ERROR(IntegrationError, Error, true)
QDE_DEFINE_ERROR(NotASolution, Error, true)
QDE_DEFINE_ERROR(EigenFailure, Error, true)
QDE_DEFINE_ERROR(ResidualTooLarge, Error, true)
QDE_DEFINE_ERROR(DefectiveMatrix, Error, true)
QDE_DEFINE_ERROR(ConditionViolated, Error, true)
QDE_DEFINE_ERROR(SingularCertificate, Error, true)
QDE_DEFINE_ERROR(NonUnitAxis, Error, false)
QDE_DEFINE_ERROR(InputError, Error, false)

#undef QDE_DEFINE_ERROR

/// Malformed text input; offset is the byte position where parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    const char* name() const noexcept override { return "ParseError"; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace qde
