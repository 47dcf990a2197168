#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <defsieve/arith.hpp>
#include <defsieve/qseries.hpp>

namespace defsieve {

enum class Source { builtin, ingested };

// Local automorphic type at a prime dividing the level.
enum class LocalType { special, principal_series, supercuspidal, unknown };

inline const char* to_string(LocalType t) {
    switch (t) {
        case LocalType::special: return "special";
        case LocalType::principal_series: return "principal_series";
        case LocalType::supercuspidal: return "supercuspidal";
        case LocalType::unknown: return "unknown";
    }
    return "unknown";
}

struct RamanujanViolation {
    std::uint64_t p = 0;
    Integer a_p;
};

// Eigenvalue data of a newform: weight, level, quadratic character values,
// and a_p for every prime p up to a declared bound. Immutable once built.
class NewformData {
public:
    NewformData(std::string id, unsigned weight, unsigned level, Source source,
                std::uint64_t bound, std::map<std::uint64_t, Integer> eigenvalues,
                std::map<std::uint64_t, int> character = {},
                std::map<std::uint64_t, LocalType> local_types = {})
        : id_(std::move(id)),
          weight_(weight),
          level_(level),
          source_(source),
          bound_(bound),
          eigenvalues_(std::move(eigenvalues)),
          character_(std::move(character)),
          local_types_(std::move(local_types)) {
        if (weight_ < 2) throw std::invalid_argument("NewformData: weight must be >= 2");
        if (level_ < 1) throw std::invalid_argument("NewformData: level must be >= 1");
        if (source_ == Source::builtin) {
            if (level_ != 1 || !character_.empty())
                throw std::invalid_argument(
                    "NewformData: builtin forms have level 1 and trivial character");
            switch (weight_) {
                case 12: case 16: case 18: case 20: case 22: case 26: break;
                default:
                    throw std::invalid_argument(
                        "NewformData: builtin weight must be 12,16,18,20,22 or 26");
            }
        }
        for (const auto& [p, v] : character_)
            if (v != 1 && v != -1)
                throw std::invalid_argument("NewformData: character values must be +-1");
        if (bound_ >= 2)
            for (std::uint64_t p : primes_upto(bound_))
                if (eigenvalues_.find(p) == eigenvalues_.end())
                    throw InsufficientDataError(
                        "NewformData: missing eigenvalue a_" + std::to_string(p), p);
    }

    // The six level-1 forms: eigenvalues read off a fresh q-expansion.
    static NewformData builtin(unsigned weight, std::uint64_t bound) {
        QExpansion f = level1_cuspform(weight, static_cast<std::size_t>(bound) + 1);
        return from_expansion(f, weight, bound);
    }

    // Same, reusing an already computed (possibly cached) expansion.
    static NewformData from_expansion(const QExpansion& f, unsigned weight,
                                      std::uint64_t bound) {
        if (f.precision() < bound + 1)
            throw InsufficientDataError("from_expansion: precision " +
                                            std::to_string(f.precision()) +
                                            " below bound " + std::to_string(bound),
                                        bound);
        std::map<std::uint64_t, Integer> ev;
        for (std::uint64_t p : primes_upto(bound)) ev.emplace(p, f.coefficient(p));
        return NewformData("level1-weight" + std::to_string(weight), weight, 1,
                           Source::builtin, bound, std::move(ev));
    }

    const std::string& id() const { return id_; }
    unsigned weight() const { return weight_; }
    unsigned level() const { return level_; }
    Source source() const { return source_; }
    std::uint64_t bound() const { return bound_; }

    bool has_eigenvalue(std::uint64_t p) const {
        return eigenvalues_.find(p) != eigenvalues_.end();
    }

    const Integer& a(std::uint64_t p) const {
        auto it = eigenvalues_.find(p);
        if (it == eigenvalues_.end())
            throw InsufficientDataError("missing eigenvalue a_" + std::to_string(p), p);
        return it->second;
    }

    // Character value at a prime not dividing the level; stored values are
    // +-1, everything else defaults to the trivial value 1.
    int omega(std::uint64_t p) const {
        if (level_ % p == 0)
            throw std::invalid_argument("omega: p divides the level");
        auto it = character_.find(p);
        return it == character_.end() ? 1 : it->second;
    }

    LocalType local_type(std::uint64_t p) const {
        if (level_ % p != 0)
            throw std::invalid_argument("local_type: p does not divide the level");
        auto it = local_types_.find(p);
        return it == local_types_.end() ? LocalType::unknown : it->second;
    }

    const std::map<std::uint64_t, Integer>& eigenvalues() const { return eigenvalues_; }

    // Ramanujan-bound violations recorded at ingestion; data is kept but
    // marked suspect.
    const std::vector<RamanujanViolation>& suspect_report() const { return suspect_; }
    void attach_suspect_report(std::vector<RamanujanViolation> report) {
        suspect_ = std::move(report);
    }

private:
    std::string id_;
    unsigned weight_;
    unsigned level_;
    Source source_;
    std::uint64_t bound_;
    std::map<std::uint64_t, Integer> eigenvalues_;
    std::map<std::uint64_t, int> character_;
    std::map<std::uint64_t, LocalType> local_types_;
    std::vector<RamanujanViolation> suspect_;
};

}  // namespace defsieve
