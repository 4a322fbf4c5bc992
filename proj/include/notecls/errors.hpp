#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace notecls {

// Base for all domain errors raised by the library. CLI maps these to exit 1,
// IoError and MalformedRecord to exit 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

class MalformedRecord : public Error {
public:
    MalformedRecord(std::size_t line_no, const std::string& detail)
        : Error("malformed record at line " + std::to_string(line_no) + ": " + detail),
          line_no(line_no) {}
    std::size_t line_no;
};

class DuplicateId : public Error {
public:
    explicit DuplicateId(const std::string& id)
        : Error("duplicate note id: " + id), id(id) {}
    std::string id;
};

class InsufficientGroups : public Error {
public:
    explicit InsufficientGroups(const std::string& msg) : Error(msg) {}
};

class UnsatisfiableSplit : public Error {
public:
    explicit UnsatisfiableSplit(const std::string& msg) : Error(msg) {}
};

class ContaminationError : public Error {
public:
    explicit ContaminationError(const std::string& msg) : Error(msg) {}
};

class EmptyVocabulary : public Error {
public:
    EmptyVocabulary() : Error("no token survives the min_df threshold") {}
};

class InvalidDimension : public Error {
public:
    explicit InvalidDimension(const std::string& msg) : Error(msg) {}
};

class NoTrainingPairs : public Error {
public:
    NoTrainingPairs() : Error("corpus yields no (center, context) training pairs") {}
};

class NegativeFeature : public Error {
public:
    explicit NegativeFeature(const std::string& msg) : Error(msg) {}
};

class SingleClass : public Error {
public:
    SingleClass() : Error("both classes must be present") {}
};

class KTooLarge : public Error {
public:
    explicit KTooLarge(const std::string& msg) : Error(msg) {}
};

class KTooSmall : public Error {
public:
    explicit KTooSmall(const std::string& msg) : Error(msg) {}
};

class ClassTooSmall : public Error {
public:
    explicit ClassTooSmall(const std::string& msg) : Error(msg) {}
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(got)) {}
};

class LengthMismatch : public Error {
public:
    LengthMismatch(std::size_t a, std::size_t b)
        : Error("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class InvalidArchitecture : public Error {
public:
    explicit InvalidArchitecture(const std::string& msg) : Error(msg) {}
};

class InvalidConfig : public Error {
public:
    explicit InvalidConfig(const std::string& msg) : Error(msg) {}
};

class VersionMismatch : public Error {
public:
    VersionMismatch(int expected, int got)
        : Error("artifact version mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(got)) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

} // namespace notecls
