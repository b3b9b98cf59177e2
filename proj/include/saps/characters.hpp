#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "saps/numeric.hpp"
#include "saps/sieve.hpp"

namespace saps {

inline constexpr std::uint64_t kCharacterModulusCap = 1000000;

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = (r * b) % m;
        b = (b * b) % m;
        e >>= 1;
    }
    return r;
}

// The unit group mod q, split into cyclic components with fixed generators:
// smallest primitive root for odd prime powers and for 4; the pair {-1, 5}
// for 2^e with e >= 3.  Character labels are the lexicographic index of the
// exponent vector over these components, so label 0 is always principal and
// the labelling is stable across runs and platforms.
class CharacterGroup {
  public:
    struct Factor {
        std::uint64_t prime = 0;
        unsigned exp = 0;
        std::uint64_t modulus = 1;        // prime^exp
        bool two_part = false;            // 2^e with e >= 3: {-1,5} structure
        std::vector<std::uint32_t> dlog;  // index of the cyclic part
        std::vector<std::uint8_t> sign;   // (-1)-component bit, two_part only
        std::uint64_t generator = 0;      // cyclic generator (unused if two_part)
    };
    struct Component {
        std::size_t factor = 0;
        bool is_sign = false;       // the (-1) component of a two_part factor
        std::uint64_t order = 1;    // d_i
        std::uint64_t stride = 1;   // product of orders of later components
    };

    static std::shared_ptr<const CharacterGroup> make(std::uint64_t q,
                                                      std::uint64_t cap = kCharacterModulusCap) {
        if (q < 1) throw std::invalid_argument("character modulus must be >= 1");
        if (q > cap) throw std::invalid_argument("character modulus exceeds cap");
        {
            std::lock_guard<std::mutex> lock(cache_mutex());
            auto it = cache().find(q);
            if (it != cache().end()) return it->second;
        }
        auto g = std::shared_ptr<const CharacterGroup>(new CharacterGroup(q));
        if (q <= 4096) {
            std::lock_guard<std::mutex> lock(cache_mutex());
            cache().emplace(q, g);
        }
        return g;
    }

    std::uint64_t modulus() const { return q_; }
    std::uint64_t order() const { return phi_; }  // = phi(q)
    const std::vector<Factor>& factors() const { return factors_; }
    const std::vector<Component>& components() const { return components_; }

    // exponent vector of the character with the given label
    std::vector<std::uint64_t> exponents(std::uint64_t label) const {
        if (label >= phi_) throw std::invalid_argument("character label out of range");
        std::vector<std::uint64_t> e(components_.size());
        for (std::size_t i = 0; i < components_.size(); ++i)
            e[i] = (label / components_[i].stride) % components_[i].order;
        return e;
    }

    std::uint64_t label_of(const std::vector<std::uint64_t>& exps) const {
        std::uint64_t label = 0;
        for (std::size_t i = 0; i < components_.size(); ++i)
            label += (exps[i] % components_[i].order) * components_[i].stride;
        return label;
    }

    // phase numerator k with chi(n) = e(k / phi(q)), or no value if
    // gcd(n, q) > 1
    std::optional<std::uint64_t> phase(const std::vector<std::uint64_t>& exps,
                                       std::uint64_t n) const {
        std::uint64_t k = 0;
        std::size_t ci = 0;
        for (const auto& f : factors_) {
            std::uint64_t r = n % f.modulus;
            if (f.prime != 0 && r % f.prime == 0) return std::nullopt;
            if (f.two_part) {
                const auto& sign_comp = components_[ci];
                const auto& main_comp = components_[ci + 1];
                std::uint64_t s = f.sign[r], t = f.dlog[r];
                k += ((exps[ci] * s) % sign_comp.order) * (phi_ / sign_comp.order);
                k %= phi_;
                k += ((exps[ci + 1] * t) % main_comp.order) * (phi_ / main_comp.order);
                k %= phi_;
                ci += 2;
            } else {
                const auto& comp = components_[ci];
                std::uint64_t t = f.dlog[r];
                k += ((exps[ci] * t) % comp.order) * (phi_ / comp.order);
                k %= phi_;
                ci += 1;
            }
        }
        return k;
    }

  private:
    explicit CharacterGroup(std::uint64_t q) : q_(q) {
        phi_ = 1;
        for (auto [p, e] : factorize(q)) {
            Factor f;
            f.prime = p;
            f.exp = e;
            f.modulus = 1;
            for (unsigned i = 0; i < e; ++i) f.modulus *= p;
            if (p == 2) {
                if (e == 1) {
                    // trivial unit group mod 2; kept so evaluation still
                    // vanishes on even n
                    f.dlog.assign(2, 0);
                    factors_.push_back(std::move(f));
                    add_component(factors_.size() - 1, false, 1);
                    continue;
                }
                if (e == 2) {
                    f.generator = 3;
                    f.dlog.assign(4, 0);
                    f.dlog[3] = 1;
                    factors_.push_back(std::move(f));
                    add_component(factors_.size() - 1, false, 2);
                } else {
                    f.two_part = true;
                    std::uint64_t m = f.modulus;
                    std::uint64_t half = m >> 2;  // 2^{e-2}
                    f.dlog.assign(m, 0);
                    f.sign.assign(m, 0);
                    std::uint64_t v = 1;
                    for (std::uint64_t t = 0; t < half; ++t) {
                        f.dlog[v] = static_cast<std::uint32_t>(t);
                        f.sign[v] = 0;
                        std::uint64_t w = m - v;
                        f.dlog[w] = static_cast<std::uint32_t>(t);
                        f.sign[w] = 1;
                        v = (v * 5) % m;
                    }
                    factors_.push_back(std::move(f));
                    add_component(factors_.size() - 1, true, 2);
                    add_component(factors_.size() - 1, false, half);
                }
            } else {
                std::uint64_t m = f.modulus;
                std::uint64_t ord = m / p * (p - 1);  // phi(p^e)
                f.generator = smallest_primitive_root(p, e);
                f.dlog.assign(m, 0);
                std::uint64_t v = 1;
                for (std::uint64_t t = 0; t < ord; ++t) {
                    f.dlog[v] = static_cast<std::uint32_t>(t);
                    v = (v * f.generator) % m;
                }
                factors_.push_back(std::move(f));
                add_component(factors_.size() - 1, false, ord);
            }
        }
        // strides: lexicographic order of exponent vectors
        std::uint64_t s = 1;
        for (std::size_t i = components_.size(); i-- > 0;) {
            components_[i].stride = s;
            s *= components_[i].order;
        }
        phi_ = s;
    }

    void add_component(std::size_t factor, bool is_sign, std::uint64_t order) {
        components_.push_back(Component{factor, is_sign, order, 1});
    }

    static std::uint64_t smallest_primitive_root(std::uint64_t p, unsigned e) {
        std::uint64_t target = p - 1;
        auto fac = factorize(target);
        for (std::uint64_t g = 2; g < p * p; ++g) {
            if (g % p == 0) continue;
            bool ok = true;
            for (auto [r, _] : fac) {
                if (pow_mod(g, target / r, p) == 1) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            if (e >= 2) {
                std::uint64_t p2 = p * p;
                if (pow_mod(g % p2, p - 1, p2) == 1) continue;
            }
            return g;
        }
        throw std::logic_error("no primitive root found");
    }

    static std::map<std::uint64_t, std::shared_ptr<const CharacterGroup>>& cache() {
        static std::map<std::uint64_t, std::shared_ptr<const CharacterGroup>> c;
        return c;
    }
    static std::mutex& cache_mutex() {
        static std::mutex m;
        return m;
    }

    std::uint64_t q_;
    std::uint64_t phi_;
    std::vector<Factor> factors_;
    std::vector<Component> components_;
};

class DirichletCharacter {
  public:
    DirichletCharacter(std::shared_ptr<const CharacterGroup> group, std::uint64_t label)
        : group_(std::move(group)), label_(label), exps_(group_->exponents(label)) {
        conductor_ = compute_conductor();
        auto k = group_->phase(exps_, group_->modulus() == 1 ? 1 : group_->modulus() - 1);
        parity_ = (k && *k != 0) ? 1 : 0;  // chi(-1) = e(k/phi) must be +-1
    }

    std::uint64_t modulus() const { return group_->modulus(); }
    std::uint64_t label() const { return label_; }
    std::uint64_t conductor() const { return conductor_; }
    int parity() const { return parity_; }  // a = (1 - chi(-1)) / 2
    bool is_principal() const { return label_ == 0; }
    bool is_primitive() const { return conductor_ == modulus(); }
    const CharacterGroup& group() const { return *group_; }
    std::shared_ptr<const CharacterGroup> group_ptr() const { return group_; }
    const std::vector<std::uint64_t>& exponents() const { return exps_; }

    // "q.label", the stable key used in report files
    std::string key() const {
        return std::to_string(modulus()) + "." + std::to_string(label_);
    }

    std::optional<std::uint64_t> phase(std::uint64_t n) const {
        return group_->phase(exps_, n);
    }

    cplx eval(std::uint64_t n) const {
        auto k = group_->phase(exps_, n);
        if (!k) return {0.0, 0.0};
        std::uint64_t phi = group_->order();
        if (*k == 0) return {1.0, 0.0};
        if (2 * *k == phi) return {-1.0, 0.0};
        if (4 * *k == phi) return {0.0, 1.0};
        if (4 * *k == 3 * phi) return {0.0, -1.0};
        return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(*k) /
                                   static_cast<double>(phi));
    }

    cplx operator()(std::uint64_t n) const { return eval(n); }

  private:
    std::uint64_t compute_conductor() const {
        std::uint64_t f = 1;
        const auto& comps = group_->components();
        const auto& factors = group_->factors();
        std::size_t ci = 0;
        for (std::size_t fi = 0; fi < factors.size(); ++fi) {
            const auto& fac = factors[fi];
            if (fac.two_part) {
                std::uint64_t cs = exps_[ci], ct = exps_[ci + 1];
                std::uint64_t half = comps[ci + 1].order;  // 2^{e-2}
                if (ct != 0) {
                    std::uint64_t ot = half / std::gcd(ct, half);
                    f *= 4 * ot;
                } else if (cs != 0) {
                    f *= 4;
                }
                ci += 2;
            } else {
                std::uint64_t c = exps_[ci];
                std::uint64_t d = comps[ci].order;
                if (c != 0) {
                    if (fac.prime == 2) {
                        f *= 4;  // the 2^2 factor
                    } else {
                        std::uint64_t o = d / std::gcd(c, d);
                        std::uint64_t pj = fac.prime;
                        while (o % fac.prime == 0) {
                            o /= fac.prime;
                            pj *= fac.prime;
                        }
                        f *= pj;
                    }
                }
                ci += 1;
            }
        }
        return f;
    }

    std::shared_ptr<const CharacterGroup> group_;
    std::uint64_t label_;
    std::vector<std::uint64_t> exps_;
    std::uint64_t conductor_ = 1;
    int parity_ = 0;
};

inline std::vector<DirichletCharacter> enumerate_characters(
    std::uint64_t q, std::uint64_t cap = kCharacterModulusCap) {
    auto g = CharacterGroup::make(q, cap);
    std::vector<DirichletCharacter> out;
    out.reserve(g->order());
    for (std::uint64_t label = 0; label < g->order(); ++label)
        out.emplace_back(g, label);
    return out;
}

inline DirichletCharacter character(std::uint64_t q, std::uint64_t label,
                                    std::uint64_t cap = kCharacterModulusCap) {
    return DirichletCharacter(CharacterGroup::make(q, cap), label);
}

inline std::vector<DirichletCharacter> primitive_characters(
    std::uint64_t q, std::uint64_t cap = kCharacterModulusCap) {
    std::vector<DirichletCharacter> out;
    for (auto& chi : enumerate_characters(q, cap))
        if (chi.is_primitive()) out.push_back(chi);
    return out;
}

// conductor d and the primitive character mod d inducing chi
inline std::pair<std::uint64_t, DirichletCharacter> conductor_and_inducer(
    const DirichletCharacter& chi) {
    std::uint64_t f = chi.conductor();
    auto fgroup = CharacterGroup::make(f);
    std::vector<std::uint64_t> fexps(fgroup->components().size(), 0);

    const auto& G = chi.group();
    const auto& sf = G.factors();
    const auto& sc = G.components();
    const auto& df = fgroup->factors();
    const auto& dc = fgroup->components();

    // match prime-power blocks of the conductor against the source group
    std::size_t s_ci = 0;
    std::map<std::uint64_t, std::pair<std::size_t, std::size_t>> src;  // prime -> (factor, first comp)
    for (std::size_t i = 0; i < sf.size(); ++i) {
        src[sf[i].prime] = {i, s_ci};
        s_ci += sf[i].two_part ? 2 : 1;
    }

    std::size_t d_ci = 0;
    for (std::size_t i = 0; i < df.size(); ++i) {
        const auto& dfac = df[i];
        auto [sfi, sci] = src.at(dfac.prime);
        const auto& sfac = sf[sfi];
        if (dfac.prime == 2) {
            if (sfac.two_part) {
                std::uint64_t cs = chi.exponents()[sci], ct = chi.exponents()[sci + 1];
                std::uint64_t e_half = sc[sci + 1].order;
                if (dfac.two_part) {
                    std::uint64_t k_half = dc[d_ci + 1].order;
                    fexps[d_ci] = cs;
                    fexps[d_ci + 1] = ct / (e_half / k_half);
                    d_ci += 2;
                } else {
                    // conductor block is 4: only the sign character survives
                    fexps[d_ci] = cs;
                    d_ci += 1;
                }
            } else {
                // source block is 4 and the component is nontrivial
                fexps[d_ci] = chi.exponents()[sci];
                d_ci += 1;
            }
        } else {
            std::uint64_t c = chi.exponents()[sci];
            std::uint64_t d_src = sc[sci].order;
            std::uint64_t d_dst = dc[d_ci].order;
            // express the component on the conductor-level generator
            std::uint64_t w = dfac.generator;
            std::uint64_t D = sfac.dlog[w % sfac.modulus];
            std::uint64_t drop = d_src / d_dst;  // p^{e-k}
            std::uint64_t c0 = c / drop;         // exact; conductor divides p^k
            fexps[d_ci] = (c0 % d_dst) * (D % d_dst) % d_dst;
            d_ci += 1;
        }
    }
    return {f, DirichletCharacter(fgroup, fgroup->label_of(fexps))};
}

inline DirichletCharacter conj_character(const DirichletCharacter& chi) {
    const auto& comps = chi.group().components();
    auto exps = chi.exponents();
    for (std::size_t i = 0; i < comps.size(); ++i)
        exps[i] = (comps[i].order - exps[i]) % comps[i].order;
    return DirichletCharacter(chi.group_ptr(), chi.group().label_of(exps));
}

// tau(chi) = sum_a chi(a) e(a/q), primitive chi mod q > 1
inline cplx gauss_sum(const DirichletCharacter& chi) {
    if (!chi.is_primitive() || chi.modulus() <= 1)
        throw std::invalid_argument("gauss_sum requires a primitive character mod q > 1");
    std::uint64_t q = chi.modulus();
    double phi = static_cast<double>(chi.group().order());
    CompensatedComplexSum s;
    for (std::uint64_t a = 1; a < q; ++a) {
        auto k = chi.phase(a);
        if (!k) continue;
        double angle = 2.0 * std::numbers::pi *
                       (static_cast<double>(*k) / phi + static_cast<double>(a) / static_cast<double>(q));
        s.add(std::polar(1.0, angle));
    }
    return s.value();
}

}  // namespace saps
