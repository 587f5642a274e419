#include "itfh/mppm.hpp"

#include "itfh/config.hpp"
#include "itfh/errors.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace itfh {

MppmCodebook::MppmCodebook(int N, int w) : N_(N), w_(w), p2_(0)
{
    if (N < 1 || N > kMaxSlots)
        throw ConfigError("MPPM codebook: N must be in [1, 64]");
    if (w < 1 || w > N)
        throw ConfigError("MPPM codebook: w must satisfy 1 <= w <= N");
    const auto count = binomial(N, w);
    if (count < 2)
        throw ConfigError("MPPM codebook: C(N, w) must be at least 2");
    while ((static_cast<unsigned __int128>(1) << (p2_ + 1)) <= count)
        ++p2_;
    if (p2_ > kMaxPatternBits)
        throw ConfigError("MPPM codebook: more than 2^24 patterns requested");

    const std::size_t size = std::size_t{1} << p2_;
    patterns_.reserve(size);
    std::vector<int> idx(static_cast<std::size_t>(w));
    std::iota(idx.begin(), idx.end(), 0);
    while (patterns_.size() < size) {
        Pattern p = 0;
        for (int k : idx)
            p |= Pattern{1} << k;
        patterns_.push_back(p);
        // next combination in lexicographic order
        int i = w - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == N - w + i)
            --i;
        if (i < 0)
            break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < w; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }

    sorted_.reserve(size);
    for (std::size_t i = 0; i < patterns_.size(); ++i)
        sorted_.emplace_back(patterns_[i], static_cast<std::uint32_t>(i));
    std::sort(sorted_.begin(), sorted_.end());
}

long long MppmCodebook::find(Pattern p) const
{
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), std::make_pair(p, std::uint32_t{0}));
    if (it != sorted_.end() && it->first == p)
        return it->second;
    return -1;
}

MppmCodebook build_codebook(int N, int w)
{
    return MppmCodebook(N, w);
}

Pattern encode_pattern(std::uint64_t bits, const MppmCodebook& cb)
{
    if (bits >= cb.size())
        throw ConfigError("encode_pattern: word does not fit in p2 bits");
    return cb[bits];
}

Pattern detect_pattern(std::span<const double> r, int w)
{
    const int N = static_cast<int>(r.size());
    if (w < 0 || w > N || N > kMaxSlots)
        throw ConfigError("detect_pattern: bad w or N");
    std::vector<int> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + w, order.end(), [&](int a, int b) {
        const double ea = r[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(a)];
        const double eb = r[static_cast<std::size_t>(b)] * r[static_cast<std::size_t>(b)];
        return ea > eb || (ea == eb && a < b);
    });
    Pattern p = 0;
    for (int i = 0; i < w; ++i)
        p |= Pattern{1} << order[static_cast<std::size_t>(i)];
    return p;
}

std::uint64_t decode_pattern(Pattern detected, const MppmCodebook& cb)
{
    if (std::popcount(detected) != cb.w())
        throw ConfigError("decode_pattern: detected pattern has the wrong weight");
    if (const auto k = cb.find(detected); k >= 0)
        return static_cast<std::uint64_t>(k);
    std::uint64_t best = 0;
    int best_d = kMaxSlots + 1;
    for (std::size_t i = 0; i < cb.size(); ++i) {
        const int d = std::popcount(detected ^ cb[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<int> signal_slots(Pattern p, int N)
{
    std::vector<int> out;
    for (int k = 0; k < N; ++k)
        if (p >> k & 1u)
            out.push_back(k);
    return out;
}

std::string pattern_string(Pattern p, int N)
{
    std::string s(static_cast<std::size_t>(N), '0');
    for (int k = 0; k < N; ++k)
        if (p >> k & 1u)
            s[static_cast<std::size_t>(k)] = '1';
    return s;
}

Pattern pattern_from_string(const std::string& s)
{
    Pattern p = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '1')
            p |= Pattern{1} << k;
        else if (s[k] != '0')
            throw ConfigError("pattern string must contain only 0 and 1");
    }
    return p;
}

} // namespace itfh
