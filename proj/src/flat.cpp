#include "dqw/states.hpp"

#include <bit>

namespace dqw {

bool Section::is_zero() const {
    for (const auto& [mask, p] : parts)
        if (!p.is_zero()) return false;
    return true;
}

std::string Section::str() const {
    if (is_zero()) return "0";
    std::string s;
    for (const auto& [mask, p] : parts) {
        if (p.is_zero()) continue;
        if (!s.empty()) s += " + ";
        std::string form;
        for (int j = 0; j < dim; ++j)
            if (mask >> j & 1u) form += (form.empty() ? "dx" : "^dx") + std::to_string(j + 1);
        s += form.empty() ? "(" + p.str() + ")" : form + "*(" + p.str() + ")";
    }
    return s;
}

Section section_of(const Poly& p) {
    Section s;
    s.dim = p.dim();
    s.order = p.order();
    s.parts.emplace(0u, p);
    return s;
}

// sum_j dx^j (d/dx^j - d/dz^j), dx^j moved into place past the lower dx's
Section grothendieck_apply(const Section& s) {
    Section out;
    out.dim = s.dim;
    out.order = s.order;
    for (const auto& [mask, p] : s.parts) {
        for (int j = 0; j < s.dim; ++j) {
            unsigned bit = 1u << j;
            if (mask & bit) continue;
            Poly v = p.derivative(Var::X, j + 1) - p.derivative(Var::Z, j + 1);
            if (v.is_zero()) continue;
            if (std::popcount(mask & (bit - 1)) & 1) v = -v;
            auto [it, fresh] = out.parts.try_emplace(mask | bit, v);
            if (!fresh) it->second += v;
        }
    }
    std::erase_if(out.parts, [](const auto& kv) { return kv.second.is_zero(); });
    return out;
}

Section grothendieck_flat_check(const Poly& f) { return grothendieck_apply(section_of(f.taylor_shift())); }

}  // namespace dqw
