#include "slotnet/competition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slotnet/numerics.hpp"

namespace slotnet {

void CompetitionParams::validate() const
{
    if (!(k_retro > 0.0) || !(k_sat > 0.0) || !(eps_silent > 0.0)) {
        throw ConfigError("competition.k_retro, competition.k_sat and competition.eps_silent must be positive");
    }
}

void ModelParams::validate() const
{
    neuron.validate();
    synapse.validate();
    competition.validate();
    if (!std::isfinite(dt) || dt <= 0.0) {
        throw ConfigError("sim.dt must be positive");
    }
}

double retrograde_loss(double rival_rate_sum, double dt, const CompetitionParams& params)
{
    if (rival_rate_sum <= 0.0) {
        return 0.0;
    }
    return params.k_retro * (1.0 - std::exp(-params.k_sat * rival_rate_sum)) * dt;
}

std::vector<DendriteState> retrograde_depress(const AxonalBranchGroup& group,
                                              std::span<const double> member_rates,
                                              std::span<const DendriteState> member_states,
                                              double dt, const CompetitionParams& params)
{
    const std::size_t n = group.members.size();
    if (member_rates.size() != n || member_states.size() != n) {
        throw std::invalid_argument("branch group, rates and states must have equal length");
    }
    std::vector<DendriteState> out(member_states.begin(), member_states.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (member_rates[i] < 0.0) {
            throw NumericDomainError("firing rates must be non-negative");
        }
        double rivals = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (group.members[j].neuron != group.members[i].neuron) {
                rivals += member_rates[j];
            }
        }
        out[i].p = std::max(0.0, out[i].p - retrograde_loss(rivals, dt, params));
    }
    return out;
}

std::optional<std::size_t> winner(std::span<const double> slot_rates, const CompetitionParams& params)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < slot_rates.size(); ++i) {
        if (!best || slot_rates[i] > slot_rates[*best]) {
            best = i;
        }
    }
    if (!best || slot_rates[*best] < params.eps_silent) {
        return std::nullopt;
    }
    return best;
}

std::optional<std::size_t> winner(std::span<const double> slot_rates, const CompetitionParams& params,
                                  std::mt19937_64& rng)
{
    const auto first = winner(slot_rates, params);
    if (!first) {
        return first;
    }
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < slot_rates.size(); ++i) {
        if (slot_rates[i] == slot_rates[*first]) {
            tied.push_back(i);
        }
    }
    return tied[rng() % tied.size()];
}

bool slot_satisfied(std::span<const double> slot_rates, double eps)
{
    if (!(eps > 0.0)) {
        throw std::invalid_argument("slot tolerance must be positive");
    }
    const auto active = std::count_if(slot_rates.begin(), slot_rates.end(),
                                      [eps](double f) { return f > eps; });
    return active <= 1;
}

ContestResult run_contest(const ContestSetup& setup, const ModelParams& params,
                          const ModulationContext& modulation)
{
    const std::size_t n = setup.strengths.size();
    if (n == 0) {
        throw std::invalid_argument("a contest needs at least one neuron");
    }
    const std::size_t lines = setup.strengths.front().size();
    for (const auto& row : setup.strengths) {
        if (row.size() != lines) {
            throw std::invalid_argument("every contestant must attach to the same branches");
        }
    }

    const auto& np = params.neuron;
    std::vector<NeuronState> neurons(n);
    for (auto& neuron : neurons) {
        neuron.dendrites.assign(lines, DendriteState{0.0, np.c7, 0});
    }
    std::vector<double> rates(n, 0.0);
    std::vector<double> estimate(n, 0.0);

    ContestResult result;
    for (std::size_t step = 1; step <= setup.max_steps; ++step) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < lines; ++j) {
                neurons[i].dendrites[j] =
                    epsp_step(neurons[i].dendrites[j], setup.strengths[i][j], setup.f_in, params.dt, np);
            }
        }
        const double total = [&] {
            double s = 0.0;
            for (double f : estimate) s += f;
            return s;
        }();
        for (std::size_t i = 0; i < n; ++i) {
            const double loss = retrograde_loss(total - estimate[i], params.dt, params.competition);
            for (auto& d : neurons[i].dendrites) {
                d.p = std::max(0.0, d.p - loss);
            }
            rates[i] = rate_transfer(drive(neurons[i], modulation), np);
        }
        for (std::size_t i = 0; i < n; ++i) {
            estimate[i] += (rates[i] - estimate[i]) * params.dt / np.rate_tau;
        }
        result.steps = step;

        const double peak = *std::max_element(rates.begin(), rates.end());
        if (peak >= params.competition.eps_silent && slot_satisfied(rates, setup.rel_eps * peak)) {
            result.satisfied = true;
            break;
        }
    }
    result.rates = rates;
    result.winner = winner(rates, params.competition);
    return result;
}

}  // namespace slotnet
