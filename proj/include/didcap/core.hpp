#pragma once

// Shared vocabulary: channel parameters, error types, bit-block helpers and
// the entropy primitives every other module builds on.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace didcap {

/// Thrown when p_i + p_d = 0 reaches an operation that divides by it.
class degenerate_parameters : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown for arguments outside an operation's mathematical domain.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown when an exact enumeration would exceed its size guard.
class guard_violation : public std::length_error {
public:
    using std::length_error::length_error;
};

inline constexpr double kLn2 = 0.693147180559945309417232121458176568;
inline constexpr double kLog2e = 1.0 / kLn2;

/// Insertion / deletion probabilities of the state chain.
///
/// `p_ins` is P(Z_i = 1 | Z_{i-1} = 0), `p_del` is P(Z_i = 0 | Z_{i-1} = 1).
struct ChannelParams {
    double p_ins = 0.0;
    double p_del = 0.0;

    static ChannelParams symmetric(double p) { return {p, p}; }

    [[nodiscard]] double sum() const { return p_ins + p_del; }
    /// 1 - p_i - p_d, the second eigenvalue of the one-step matrix.
    [[nodiscard]] double eigenvalue() const { return 1.0 - p_ins - p_del; }

    void validate() const
    {
        if (!(p_ins >= 0.0 && p_ins <= 1.0) || !(p_del >= 0.0 && p_del <= 1.0)) {
            std::ostringstream os;
            os << "channel parameters out of [0,1]: p_i=" << p_ins << " p_d=" << p_del;
            throw domain_error(os.str());
        }
    }

    void require_nondegenerate() const
    {
        validate();
        if (sum() <= 0.0)
            throw degenerate_parameters("p_i + p_d must be positive");
    }

    friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

// ---------------------------------------------------------------------------
// Bit blocks. A block of `len` binary symbols is packed into an unsigned word
// with bit i holding the symbol at time offset i (LSB = earliest symbol).

using Word = std::uint64_t;

inline constexpr int kMaxBlockBits = 30;

[[nodiscard]] constexpr Word block_count(int len) { return Word{1} << len; }
[[nodiscard]] constexpr Word low_mask(int len) { return len >= 64 ? ~Word{0} : block_count(len) - 1; }
[[nodiscard]] constexpr int bit_at(Word w, int i) { return static_cast<int>((w >> i) & 1U); }
[[nodiscard]] constexpr Word complement(Word w, int len) { return (~w) & low_mask(len); }

/// Parse a left-to-right string of '0'/'1' (earliest symbol first).
inline Word parse_block(const std::string& s)
{
    if (s.size() > static_cast<std::size_t>(kMaxBlockBits))
        throw guard_violation("block string too long");
    Word w = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            w |= Word{1} << i;
        else if (s[i] != '0')
            throw domain_error("block string must contain only '0' and '1'");
    }
    return w;
}

/// Inverse of parse_block.
inline std::string format_block(Word w, int len)
{
    std::string s(static_cast<std::size_t>(len), '0');
    for (int i = 0; i < len; ++i)
        if (bit_at(w, i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

// ---------------------------------------------------------------------------
// Entropy primitives. Results are in bits; 0 log 0 = 0.

/// -x log2 x with the 0 log 0 = 0 convention.
[[nodiscard]] inline double neg_xlog2x(double x)
{
    return x > 0.0 ? -x * std::log2(x) : 0.0;
}

/// Binary entropy h2(x) in bits.
///
/// Arguments within 1e-12 of [0,1] are clamped; anything further out is a
/// domain error. The smaller of x and 1-x is used as the working argument so
/// that arguments close to 1 do not lose precision.
[[nodiscard]] inline double binary_entropy(double x)
{
    constexpr double slack = 1e-12;
    if (!(x >= -slack && x <= 1.0 + slack))
        throw domain_error("binary_entropy argument outside [0,1]: " + std::to_string(x));
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double t = x <= 0.5 ? x : 1.0 - x;
    return -t * std::log2(t) - (1.0 - t) * std::log1p(-t) * kLog2e;
}

/// Shannon entropy (bits) of a probability vector.
[[nodiscard]] inline double entropy_of(std::span<const double> probs)
{
    double h = 0.0;
    for (double p : probs) h += neg_xlog2x(p);
    return h;
}

/// Compensated accumulator for long sums.
class KahanSum {
public:
    void add(double v)
    {
        const double y = v - c_;
        const double t = sum_ + y;
        c_ = (t - sum_) - y;
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

}  // namespace didcap
