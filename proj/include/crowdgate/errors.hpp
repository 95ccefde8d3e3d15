#pragma once

// Exception types thrown across the library. Every contract violation has a
// distinct type so callers (and tests) can tell refusals apart.

#include <stdexcept>
#include <string>

namespace crowdgate {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// batch assembly
struct InsufficientGoldens final : Error { using Error::Error; };
struct InsufficientQuestions final : Error { using Error::Error; };

// worker-count prediction
struct EvenWorkerCount final : Error { using Error::Error; };
struct MeanAccuracyNotAboveHalf final : Error { using Error::Error; };
struct InvalidAccuracyTarget final : Error { using Error::Error; };
struct WorkerCapExceeded final : Error { using Error::Error; };

// answer fusion
struct DomainTooSmall final : Error { using Error::Error; };
struct MissingProfile final : Error { using Error::Error; };
struct EmptyObservation final : Error { using Error::Error; };
struct IncompleteObservation final : Error { using Error::Error; };

// online sessions
struct SessionClosed final : Error { using Error::Error; };
struct DuplicateWorker final : Error { using Error::Error; };
struct NoVotesYet final : Error { using Error::Error; };
struct EmptyStream final : Error { using Error::Error; };

// golden-question scoring
struct NoGoldens final : Error { using Error::Error; };
struct MissingAnswer final : Error { using Error::Error; };
struct WorkerSetMismatch final : Error { using Error::Error; };

// simulation
struct InvalidDistribution final : Error { using Error::Error; };
struct PoolTooSmall final : Error { using Error::Error; };

// serialization / config
struct ParseError final : Error { using Error::Error; };

}  // namespace crowdgate
