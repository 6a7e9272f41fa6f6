#pragma once

// n-qubit Pauli operators as (x, z) bit masks with an i^phase prefactor, plus
// single-qubit Clifford elements represented by their action on X and Z.
// The phase convention is P = i^phase * prod_q X_q^{x_q} Z_q^{z_q}; with it,
// products and conjugations reduce to mask xors and popcount parities.

#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

namespace gst {

struct Pauli {
    uint32_t x = 0;
    uint32_t z = 0;
    uint8_t phase = 0;  // power of i, mod 4

    bool operator==(const Pauli&) const = default;
};

inline Pauli pauli_mul(const Pauli& a, const Pauli& b) {
    // moving Z^{a.z} past X^{b.x} gives (-1)^{|a.z & b.x|}
    uint8_t ph = static_cast<uint8_t>((a.phase + b.phase + 2 * (std::popcount(a.z & b.x) & 1)) & 3);
    return {a.x ^ b.x, a.z ^ b.z, ph};
}

inline bool pauli_commutes(const Pauli& a, const Pauli& b) {
    return ((std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) & 1) == 0;
}

inline bool pauli_is_identity_up_to_phase(const Pauli& p) { return p.x == 0 && p.z == 0; }

inline std::string pauli_to_string(const Pauli& p, int n) {
    static const char* ph[4] = {"+", "+i", "-", "-i"};
    std::string s = ph[p.phase];
    for (int q = 0; q < n; ++q) {
        bool xb = (p.x >> q) & 1, zb = (p.z >> q) & 1;
        s += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
    }
    return s;
}

// ---------------------------------------------------------------------------
// Single-qubit Cliffords. An element is pinned down by the images of X and Z
// (axis + sign each, distinct axes): 3*2*2*2 = 24 elements, global phase
// dropped. Axis encoding: 0=X, 1=Y, 2=Z.

struct AxisSign {
    uint8_t axis = 0;
    uint8_t neg = 0;

    bool operator==(const AxisSign&) const = default;
};

namespace detail {
// one-qubit pauli as (x, z, phase); Y = i*X*Z
struct P1 {
    uint8_t x, z, phase;
};
inline P1 axis_to_p1(AxisSign a) {
    switch (a.axis) {
        case 0: return {1, 0, static_cast<uint8_t>(a.neg ? 2 : 0)};
        case 1: return {1, 1, static_cast<uint8_t>(a.neg ? 3 : 1)};
        default: return {0, 1, static_cast<uint8_t>(a.neg ? 2 : 0)};
    }
}
inline P1 p1_mul(P1 a, P1 b) {
    uint8_t ph = static_cast<uint8_t>((a.phase + b.phase + 2 * (a.z & b.x)) & 3);
    return {static_cast<uint8_t>(a.x ^ b.x), static_cast<uint8_t>(a.z ^ b.z), ph};
}
inline AxisSign p1_to_axis(P1 p) {
    assert(p.x || p.z);
    if (p.x && p.z) {
        // i^ph XZ ; Y = i XZ, so sign = i^{ph-1}
        assert(p.phase == 1 || p.phase == 3);
        return {1, static_cast<uint8_t>(p.phase == 3)};
    }
    assert(p.phase == 0 || p.phase == 2);
    return {static_cast<uint8_t>(p.x ? 0 : 2), static_cast<uint8_t>(p.phase == 2)};
}
}  // namespace detail

struct SingleClifford {
    AxisSign img_x{0, 0};  // image of X under conjugation
    AxisSign img_z{2, 0};  // image of Z

    bool operator==(const SingleClifford&) const = default;
    bool is_identity() const { return img_x == AxisSign{0, 0} && img_z == AxisSign{2, 0}; }

    AxisSign img_y() const {
        // c(Y) = c(iXZ) = i c(X) c(Z)
        auto p = detail::p1_mul(detail::axis_to_p1(img_x), detail::axis_to_p1(img_z));
        p.phase = static_cast<uint8_t>((p.phase + 1) & 3);
        return detail::p1_to_axis(p);
    }

    // apply after `other`: (*this o other)(P) = this(other(P))
    SingleClifford compose(const SingleClifford& other) const {
        auto lift = [&](AxisSign a) {
            AxisSign img = a.axis == 0 ? img_x : (a.axis == 1 ? img_y() : img_z);
            img.neg ^= a.neg;
            return img;
        };
        return {lift(other.img_x), lift(other.img_z)};
    }

    SingleClifford inverse() const {
        // search is fine: group of 24, used rarely per call site
        for (uint8_t ax = 0; ax < 3; ++ax)
            for (uint8_t az = 0; az < 3; ++az) {
                if (ax == az) continue;
                for (uint8_t sx = 0; sx < 2; ++sx)
                    for (uint8_t sz = 0; sz < 2; ++sz) {
                        SingleClifford c{{ax, sx}, {az, sz}};
                        if (compose(c).is_identity() && c.compose(*this).is_identity()) return c;
                    }
            }
        assert(false);
        return {};
    }

    uint8_t pack() const {
        uint8_t azr = img_z.axis > img_x.axis ? static_cast<uint8_t>(img_z.axis - 1) : img_z.axis;
        return static_cast<uint8_t>(((img_x.axis * 2 + azr) * 2 + img_x.neg) * 2 + img_z.neg);
    }
    static SingleClifford unpack(uint8_t code) {
        uint8_t sz = code & 1;
        uint8_t sx = (code >> 1) & 1;
        uint8_t azr = (code >> 2) % 2;
        uint8_t ax = static_cast<uint8_t>(code >> 3);
        uint8_t az = azr >= ax ? static_cast<uint8_t>(azr + 1) : azr;
        return {{ax, sx}, {az, sz}};
    }
};

inline const SingleClifford kCliffId{};
inline const SingleClifford kCliffH{{2, 0}, {0, 0}};     // X<->Z
inline const SingleClifford kCliffR{{1, 0}, {2, 0}};     // R = diag(1, i): X->Y, Z->Z
inline const SingleClifford kCliffRdg{{1, 1}, {2, 0}};   // X->-Y
inline const SingleClifford kCliffX{{0, 0}, {2, 1}};     // Pauli X: Z->-Z
inline const SingleClifford kCliffZ{{0, 1}, {2, 0}};     // Pauli Z: X->-X

// Per-qubit local Clifford frame; identity when empty or all-identity.
struct LocalCliffordFrame {
    std::vector<SingleClifford> ops;

    static LocalCliffordFrame identity(int n) { return {std::vector<SingleClifford>(n)}; }
    bool is_identity() const {
        for (const auto& c : ops)
            if (!c.is_identity()) return false;
        return true;
    }
    SingleClifford at(int q) const { return q < static_cast<int>(ops.size()) ? ops[q] : SingleClifford{}; }
};

}  // namespace gst
