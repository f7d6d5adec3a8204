#include "cobandit/env.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "cobandit/textio.hpp"

namespace cobandit {

bool Instance::is_local(Agent j, Arm i) const {
    const auto& set = local_sets[static_cast<std::size_t>(j)];
    return std::binary_search(set.begin(), set.end(), i);
}

std::vector<Round> Instance::schedule(Agent j) const {
    return decision_rounds(inter_round_gaps[static_cast<std::size_t>(j)], horizon);
}

void Instance::validate() const {
    if (num_arms < 1) throw std::invalid_argument("instance: num_arms must be >= 1");
    if (num_agents < 1) throw std::invalid_argument("instance: num_agents must be >= 1");
    if (horizon < 1) throw std::invalid_argument("instance: horizon must be >= 1");
    if (static_cast<std::int32_t>(means.size()) != num_arms)
        throw std::invalid_argument("instance: means size mismatch");
    for (double m : means)
        if (!(m >= 0.0 && m <= 1.0))
            throw std::invalid_argument("instance: arm mean outside [0,1]");
    if (static_cast<std::int32_t>(local_sets.size()) != num_agents)
        throw std::invalid_argument("instance: local_sets size mismatch");
    for (const auto& set : local_sets) {
        if (set.empty()) throw std::invalid_argument("instance: empty local set");
        for (Arm a : set)
            if (a < 0 || a >= num_arms)
                throw std::invalid_argument("instance: local set arm out of range");
        if (!std::is_sorted(set.begin(), set.end()))
            throw std::invalid_argument("instance: local set not sorted");
        if (std::adjacent_find(set.begin(), set.end()) != set.end())
            throw std::invalid_argument("instance: duplicate arm in local set");
    }
    if (static_cast<std::int32_t>(inter_round_gaps.size()) != num_agents)
        throw std::invalid_argument("instance: inter_round_gaps size mismatch");
    for (auto g : inter_round_gaps)
        if (g < 1) throw std::invalid_argument("instance: inter-round gap must be >= 1");
    if (static_cast<std::int32_t>(delay_matrix.size()) != num_agents)
        throw std::invalid_argument("instance: delay matrix row count mismatch");
    for (std::int32_t r = 0; r < num_agents; ++r) {
        const auto& row = delay_matrix[static_cast<std::size_t>(r)];
        if (static_cast<std::int32_t>(row.size()) != num_agents)
            throw std::invalid_argument("instance: delay matrix column count mismatch");
        for (auto d : row)
            if (d < 0) throw std::invalid_argument("instance: negative delay");
        if (row[static_cast<std::size_t>(r)] != 0)
            throw std::invalid_argument("instance: delay matrix diagonal must be 0");
    }
}

std::vector<Round> decision_rounds(std::int64_t gap, Round horizon) {
    if (gap < 1) throw std::invalid_argument("decision_rounds: gap must be >= 1");
    if (horizon < 1) throw std::invalid_argument("decision_rounds: horizon must be >= 1");
    std::int64_t n = horizon / gap;
    std::vector<Round> rounds;
    rounds.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 1; k <= n; ++k) rounds.push_back(k * gap);
    return rounds;
}

RewardSource::RewardSource(const Instance& instance, std::uint64_t seed)
    : instance_(&instance),
      seed_(seed),
      next_ordinal_(static_cast<std::size_t>(instance.num_arms), 0) {}

int RewardSource::draw(Arm arm) {
    if (arm < 0 || arm >= instance_->num_arms)
        throw std::out_of_range("RewardSource::draw: arm index out of range");
    std::int64_t ordinal = next_ordinal_[static_cast<std::size_t>(arm)]++;
    double u = counter_unit(seed_, static_cast<std::uint64_t>(arm),
                            static_cast<std::uint64_t>(ordinal));
    return u < instance_->means[static_cast<std::size_t>(arm)] ? 1 : 0;
}

namespace {

std::vector<Arm> draw_subset(std::int32_t universe, std::int32_t size, SplitMix& rng) {
    // Partial Fisher-Yates over 0..universe-1.
    std::vector<Arm> pool(static_cast<std::size_t>(universe));
    for (std::int32_t i = 0; i < universe; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (std::int32_t i = 0; i < size; ++i) {
        auto k = static_cast<std::size_t>(
            i + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(universe - i))));
        std::swap(pool[static_cast<std::size_t>(i)], pool[k]);
    }
    std::vector<Arm> subset(pool.begin(), pool.begin() + size);
    std::sort(subset.begin(), subset.end());
    return subset;
}

} // namespace

std::vector<std::vector<std::int64_t>> draw_delay_matrix(std::int32_t num_agents,
                                                         double average_delay,
                                                         std::uint64_t seed) {
    if (average_delay < 0)
        throw std::invalid_argument("draw_delay_matrix: negative average delay");
    std::vector<std::vector<std::int64_t>> d(
        static_cast<std::size_t>(num_agents),
        std::vector<std::int64_t>(static_cast<std::size_t>(num_agents), 0));
    SplitMix rng(derive_seed(seed, 0x6d6174726978ULL));
    auto lo = static_cast<std::int64_t>(0.5 * average_delay);
    auto hi = static_cast<std::int64_t>(1.5 * average_delay);
    for (std::int32_t a = 0; a < num_agents; ++a)
        for (std::int32_t b = 0; b < num_agents; ++b)
            if (a != b)
                d[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    rng.next_range(lo, hi);
    return d;
}

Instance generate_instance(const GenerationSpec& spec, Round horizon, std::uint64_t seed) {
    if (spec.num_arms < 1) throw std::invalid_argument("generate_instance: num_arms must be >= 1");
    if (spec.num_agents < 1) throw std::invalid_argument("generate_instance: num_agents must be >= 1");
    if (spec.local_set_size < 1 || spec.local_set_size > spec.num_arms)
        throw std::invalid_argument("generate_instance: local set size must be in [1, num_arms]");
    if (spec.gap_choices.empty())
        throw std::invalid_argument("generate_instance: empty gap choice list");

    Instance inst;
    inst.num_arms = spec.num_arms;
    inst.num_agents = spec.num_agents;
    inst.horizon = horizon;

    // Independent sub-streams per field keep the draw horizon-independent
    // and insensitive to field ordering.
    if (spec.mean_source == MeanSource::File) {
        auto values = load_means(spec.mean_file);
        if (static_cast<std::int32_t>(values.size()) < spec.num_arms)
            throw std::invalid_argument("generate_instance: mean file has fewer values than arms");
        inst.means.assign(values.begin(), values.begin() + spec.num_arms);
    } else {
        SplitMix rng(derive_seed(seed, 0x6d65616e73ULL));
        inst.means.resize(static_cast<std::size_t>(spec.num_arms));
        for (auto& m : inst.means) m = rng.next_unit();
    }

    {
        SplitMix rng(derive_seed(seed, 0x73657473ULL));
        inst.local_sets.reserve(static_cast<std::size_t>(spec.num_agents));
        for (std::int32_t j = 0; j < spec.num_agents; ++j)
            inst.local_sets.push_back(draw_subset(spec.num_arms, spec.local_set_size, rng));
    }

    {
        SplitMix rng(derive_seed(seed, 0x67617073ULL));
        inst.inter_round_gaps.resize(static_cast<std::size_t>(spec.num_agents));
        for (auto& g : inst.inter_round_gaps)
            g = spec.gap_choices[static_cast<std::size_t>(
                rng.next_below(spec.gap_choices.size()))];
    }

    switch (spec.delay_rule) {
    case DelayRule::Constant: {
        if (spec.delay_constant < 0)
            throw std::invalid_argument("generate_instance: negative constant delay");
        inst.delay_matrix.assign(
            static_cast<std::size_t>(spec.num_agents),
            std::vector<std::int64_t>(static_cast<std::size_t>(spec.num_agents),
                                      spec.delay_constant));
        for (std::int32_t j = 0; j < spec.num_agents; ++j)
            inst.delay_matrix[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = 0;
        break;
    }
    case DelayRule::MatrixFile: {
        auto kv = read_kv_file(spec.delay_matrix_file);
        auto rows = kv.all("delay_row");
        if (static_cast<std::int32_t>(rows.size()) != spec.num_agents)
            throw std::invalid_argument("generate_instance: delay matrix file row count mismatch");
        for (const auto* row : rows) {
            std::vector<std::int64_t> r;
            for (const auto& v : row->values)
                r.push_back(parse_int(v, spec.delay_matrix_file));
            inst.delay_matrix.push_back(std::move(r));
        }
        break;
    }
    case DelayRule::PerTrialUniform:
        // Per-trial matrices come from draw_delay_matrix with the trial seed.
        inst.delay_matrix.assign(
            static_cast<std::size_t>(spec.num_agents),
            std::vector<std::int64_t>(static_cast<std::size_t>(spec.num_agents), 0));
        break;
    }

    inst.validate();
    return inst;
}

std::vector<double> load_means(const std::string& path) {
    std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<double> values;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Trim whitespace; blank lines are tolerated, junk is not.
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
        if (trimmed.empty()) continue;
        double v = parse_double(trimmed, path + ":" + std::to_string(lineno));
        if (!(v >= 0.0 && v <= 1.0))
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": mean " + trimmed + " outside [0,1]");
        values.push_back(v);
    }
    if (values.empty()) throw std::runtime_error(path + ": no mean values found");
    return values;
}

std::string instance_to_text(const Instance& instance) {
    std::ostringstream out;
    out << "num_arms " << instance.num_arms << "\n";
    out << "num_agents " << instance.num_agents << "\n";
    out << "horizon " << instance.horizon << "\n";
    out << "means";
    for (double m : instance.means) out << " " << fmt_double(m);
    out << "\n";
    for (const auto& set : instance.local_sets) {
        out << "local_set";
        for (Arm a : set) out << " " << a;
        out << "\n";
    }
    out << "inter_round_gaps";
    for (auto g : instance.inter_round_gaps) out << " " << g;
    out << "\n";
    for (const auto& row : instance.delay_matrix) {
        out << "delay_row";
        for (auto d : row) out << " " << d;
        out << "\n";
    }
    return out.str();
}

Instance instance_from_text(const std::string& text, const std::string& origin) {
    KvFile kv = parse_kv_text(text, origin);
    Instance inst;
    auto one_int = [&](const std::string& key) {
        const auto& rec = kv.get(key);
        if (rec.values.size() != 1)
            throw std::runtime_error(origin + ": key '" + key + "' expects one value");
        return parse_int(rec.values[0], origin + ":" + key);
    };
    inst.num_arms = static_cast<std::int32_t>(one_int("num_arms"));
    inst.num_agents = static_cast<std::int32_t>(one_int("num_agents"));
    inst.horizon = one_int("horizon");
    for (const auto& v : kv.get("means").values)
        inst.means.push_back(parse_double(v, origin + ":means"));
    for (const auto* rec : kv.all("local_set")) {
        std::vector<Arm> set;
        for (const auto& v : rec->values)
            set.push_back(static_cast<Arm>(parse_int(v, origin + ":local_set")));
        inst.local_sets.push_back(std::move(set));
    }
    for (const auto& v : kv.get("inter_round_gaps").values)
        inst.inter_round_gaps.push_back(parse_int(v, origin + ":inter_round_gaps"));
    for (const auto* rec : kv.all("delay_row")) {
        std::vector<std::int64_t> row;
        for (const auto& v : rec->values)
            row.push_back(parse_int(v, origin + ":delay_row"));
        inst.delay_matrix.push_back(std::move(row));
    }
    inst.validate();
    return inst;
}

} // namespace cobandit
