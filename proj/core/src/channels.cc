#include "qwalk/channels.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qwalk {

std::string_view noise_model_name(NoiseModel model) {
    switch (model) {
        case NoiseModel::none:
            return "none";
        case NoiseModel::coin_dephase:
            return "coin_dephase";
        case NoiseModel::particle_dephase:
            return "particle_dephase";
        case NoiseModel::full_dephase:
            return "full_dephase";
        case NoiseModel::imperfect_coin:
            return "imperfect_coin";
        case NoiseModel::target_monitor:
            return "target_monitor";
    }
    return "?";
}

NoiseModel parse_noise_model(std::string_view name) {
    if (name == "coin") {
        return NoiseModel::coin_dephase;
    }
    if (name == "particle") {
        return NoiseModel::particle_dephase;
    }
    if (name == "both" || name == "full") {
        return NoiseModel::full_dephase;
    }
    if (name == "monitor") {
        return NoiseModel::target_monitor;
    }
    for (auto m : {NoiseModel::none, NoiseModel::coin_dephase, NoiseModel::particle_dephase, NoiseModel::full_dephase,
                   NoiseModel::imperfect_coin, NoiseModel::target_monitor}) {
        if (noise_model_name(m) == name) {
            return m;
        }
    }
    throw std::invalid_argument("unknown noise model '" + std::string(name) + "'");
}

NoiseSpec NoiseSpec::dephasing(NoiseModel model, double p) {
    NoiseSpec n{model, p, std::nullopt};
    if (!n.is_dephasing()) {
        throw std::invalid_argument("not a dephasing model: " + std::string(noise_model_name(model)));
    }
    n.validate();
    return n;
}

bool NoiseSpec::is_dephasing() const {
    return model == NoiseModel::coin_dephase || model == NoiseModel::particle_dephase ||
           model == NoiseModel::full_dephase;
}

void NoiseSpec::validate() const {
    if (!(p >= 0 && p <= 1)) {
        throw std::invalid_argument("decoherence rate p must lie in [0, 1], got " + std::to_string(p));
    }
    if (target.has_value() != (model == NoiseModel::target_monitor)) {
        throw std::invalid_argument("a target vertex is required by, and only by, the target_monitor model");
    }
}

void apply_channel(DensityState &rho, const NoiseSpec &noise) {
    noise.validate();
    if (!noise.is_dephasing() || noise.p == 0) {
        return;
    }
    const Space s = rho.space();
    const std::size_t v = s.vertices;
    const std::size_t d = s.dim();
    const double keep = 1.0 - noise.p;
    for (std::size_t r = 0; r < d; ++r) {
        auto row = rho.row(r);
        const std::size_t rc = r / v;
        const std::size_t rv = r % v;
        switch (noise.model) {
            case NoiseModel::full_dephase:
                for (std::size_t c = 0; c < d; ++c) {
                    if (c != r) {
                        row[c] *= keep;
                    }
                }
                break;
            case NoiseModel::coin_dephase:
                for (std::size_t c = 0; c < d; ++c) {
                    if (c / v != rc) {
                        row[c] *= keep;
                    }
                }
                break;
            case NoiseModel::particle_dephase:
                for (std::size_t c = 0; c < d; ++c) {
                    if (c % v != rv) {
                        row[c] *= keep;
                    }
                }
                break;
            default:
                break;
        }
    }
}

namespace {

std::size_t sample_index(std::span<const double> weights, double total, Rng &rng) {
    std::uniform_real_distribution<double> u(0.0, total);
    double x = u(rng);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (x < weights[i]) {
            return i;
        }
        x -= weights[i];
    }
    // Rounding left us past the end: fall back to the last non-empty outcome.
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0) {
            return i;
        }
    }
    return 0;
}

}  // namespace

// The collapsed state keeps the norm of the input, so sub-normalized
// (leaky) trajectories stay correctly weighted in ensemble averages.
void trajectory_collapse(PureState &psi, const NoiseSpec &noise, Rng &rng) {
    noise.validate();
    if (!noise.is_dephasing() || noise.p == 0) {
        return;
    }
    std::uniform_real_distribution<double> coin_flip(0.0, 1.0);
    if (noise.p < 1 && coin_flip(rng) >= noise.p) {
        return;
    }
    const Space s = psi.space();
    const std::size_t v = s.vertices;
    auto amps = psi.amplitudes();
    std::vector<double> w;
    switch (noise.model) {
        case NoiseModel::full_dephase: {
            w.resize(amps.size());
            double total = 0;
            for (std::size_t i = 0; i < amps.size(); ++i) {
                w[i] = std::norm(amps[i]);
                total += w[i];
            }
            const std::size_t k = sample_index(w, total, rng);
            const double mag = std::abs(amps[k]);
            const cplx phase = mag > 0 ? amps[k] / mag : cplx{1.0};
            std::fill(amps.begin(), amps.end(), cplx{});
            amps[k] = phase * std::sqrt(total);
            return;
        }
        case NoiseModel::coin_dephase: {
            w.assign(s.coins, 0.0);
            double total = 0;
            for (std::size_t i = 0; i < amps.size(); ++i) {
                w[i / v] += std::norm(amps[i]);
            }
            for (double x : w) {
                total += x;
            }
            const std::size_t k = sample_index(w, total, rng);
            const double scale = std::sqrt(total / w[k]);
            for (std::size_t i = 0; i < amps.size(); ++i) {
                amps[i] = (i / v == k) ? amps[i] * scale : cplx{};
            }
            return;
        }
        case NoiseModel::particle_dephase: {
            w.assign(v, 0.0);
            double total = 0;
            for (std::size_t i = 0; i < amps.size(); ++i) {
                w[i % v] += std::norm(amps[i]);
            }
            for (double x : w) {
                total += x;
            }
            const std::size_t k = sample_index(w, total, rng);
            const double scale = std::sqrt(total / w[k]);
            for (std::size_t i = 0; i < amps.size(); ++i) {
                amps[i] = (i % v == k) ? amps[i] * scale : cplx{};
            }
            return;
        }
        default:
            return;
    }
}

double monitor_target(DensityState &rho, std::size_t target, double p) {
    const Space s = rho.space();
    if (target >= s.vertices) {
        throw std::invalid_argument("monitor target out of range");
    }
    if (!(p >= 0 && p <= 1)) {
        throw std::invalid_argument("monitor probability must lie in [0, 1]");
    }
    const std::size_t v = s.vertices;
    const std::size_t d = s.dim();
    const double keep = 1.0 - p;
    double q = 0;
    for (std::size_t c = 0; c < s.coins; ++c) {
        const std::size_t i = c * v + target;
        q += rho(i, i).real();
    }
    // Every entry in a target row or column is scaled once by (1 - p).
    for (std::size_t c = 0; c < s.coins; ++c) {
        const std::size_t i = c * v + target;
        for (auto &z : rho.row(i)) {
            z *= keep;
        }
    }
    for (std::size_t r = 0; r < d; ++r) {
        if (r % v == target) {
            continue;
        }
        for (std::size_t c = 0; c < s.coins; ++c) {
            rho(r, c * v + target) *= keep;
        }
    }
    return p * q;
}

double monitor_target(PureState &psi, std::size_t target) {
    const Space s = psi.space();
    if (target >= s.vertices) {
        throw std::invalid_argument("monitor target out of range");
    }
    double q = 0;
    for (std::size_t c = 0; c < s.coins; ++c) {
        auto &a = psi.at({c, target});
        q += std::norm(a);
        a = 0;
    }
    return q;
}

}  // namespace qwalk
