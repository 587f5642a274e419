// mppm.hpp - MPPM codebook, bit mapping and square-law pattern detection

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace itfh {

// Slot pattern: bit k set <=> slot k carries a pulse.
using Pattern = std::uint64_t;

// Largest pattern alphabet we are willing to tabulate.
inline constexpr int kMaxPatternBits = 24;

class MppmCodebook {
public:
    // The first 2^p2 weight-w patterns in lexicographic order of their slot
    // index sets ({0,1,..,w-1} first), p2 = floor(log2 C(N, w)).
    MppmCodebook(int N, int w);

    int N() const { return N_; }
    int w() const { return w_; }
    int p2() const { return p2_; }
    std::size_t size() const { return patterns_.size(); }
    const std::vector<Pattern>& patterns() const { return patterns_; }
    Pattern operator[](std::size_t i) const { return patterns_[i]; }

    // Index of the pattern, or -1 when it is not in the codebook.
    long long find(Pattern p) const;

private:
    int N_;
    int w_;
    int p2_;
    std::vector<Pattern> patterns_;
    std::vector<std::pair<Pattern, std::uint32_t>> sorted_; // for lookup
};

MppmCodebook build_codebook(int N, int w);

Pattern encode_pattern(std::uint64_t bits, const MppmCodebook& cb);

// Ones at the w largest |r_k|^2; ties go to the lower slot index.
Pattern detect_pattern(std::span<const double> r, int w);

// Codebook index of `detected`; patterns outside the codebook map to the
// codebook entry at minimum Hamming distance (lowest index on ties).
std::uint64_t decode_pattern(Pattern detected, const MppmCodebook& cb);

// Signal slot indices of a pattern, ascending.
std::vector<int> signal_slots(Pattern p, int N);

// "1100" style rendering, slot 0 first.
std::string pattern_string(Pattern p, int N);
Pattern pattern_from_string(const std::string& s);

} // namespace itfh
