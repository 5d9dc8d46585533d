#pragma once

#include <stdexcept>
#include <string>

namespace seqvpr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Image / descriptor errors.
class InputTooSmall : public Error { public: using Error::Error; };
class WrongSize : public Error { public: using Error::Error; };
class LengthMismatch : public Error { public: using Error::Error; };

// Ingestion errors.
class EmptyDirectory : public Error { public: using Error::Error; };
class UnreadableImage : public Error { public: using Error::Error; };

// Database file errors.
class BadMagic : public Error { public: using Error::Error; };
class UnsupportedVersion : public Error { public: using Error::Error; };
class CorruptLength : public Error { public: using Error::Error; };
class WidthMismatch : public Error { public: using Error::Error; };

// Matching errors.
class WindowTooLong : public Error { public: using Error::Error; };
class NoThreshold : public Error { public: using Error::Error; };

// Analysis errors.
class SinglePartition : public Error { public: using Error::Error; };
class MalformedTruth : public Error { public: using Error::Error; };

// Benchmark errors.
class OutputMismatch : public Error { public: using Error::Error; };

// CSV parsing errors; message names the offending file and line.
class CsvError : public Error { public: using Error::Error; };

} // namespace seqvpr
