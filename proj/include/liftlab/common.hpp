#ifndef LIFTLAB_COMMON_HPP
#define LIFTLAB_COMMON_HPP

#include <stdexcept>
#include <string>

namespace liftlab {

inline constexpr const char* kArtifactName = "liftlab";
inline constexpr const char* kArtifactVersion = "0.1.0";

// Exit-code contract: 0 success, 1 precondition/config, 2 non-convergence,
// 3 theorem violation.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct TheoremViolation : std::runtime_error {
    explicit TheoremViolation(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNonConvergence = 2;
inline constexpr int kExitTheoremViolation = 3;

inline void require(bool cond, const std::string& what) {
    if (!cond) throw ConfigError(what);
}

}  // namespace liftlab

#endif
