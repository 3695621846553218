#pragma once

#include <stdexcept>

namespace blochasym {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularBasis : public Error { public: using Error::Error; };
class BallTooLarge : public Error { public: using Error::Error; };
class SymmetryConflict : public Error { public: using Error::Error; };
class ZeroModeSupplied : public Error { public: using Error::Error; };
class BasisTooLarge : public Error { public: using Error::Error; };
class DiagonalizationFailure : public Error { public: using Error::Error; };
class NearDegenerate : public Error { public: using Error::Error; };
class DivergenceDetected : public Error { public: using Error::Error; };
class BlockTooLarge : public Error { public: using Error::Error; };
class NoOracleMatch : public Error { public: using Error::Error; };
class NoBracket : public Error { public: using Error::Error; };
class TrackingLost : public Error { public: using Error::Error; };
class ConfigParse : public Error { public: using Error::Error; };
class NonPositiveValue : public Error { public: using Error::Error; };

}  // namespace blochasym
