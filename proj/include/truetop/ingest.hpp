#pragma once

#include "truetop/common.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace truetop {

enum class InteractionKind : std::uint8_t { retweet, reply, mention };

std::string_view to_string(InteractionKind kind);
std::optional<InteractionKind> parse_interaction_kind(std::string_view text);

struct InteractionRecord {
    UserId source;
    UserId target;
    InteractionKind kind = InteractionKind::retweet;
    std::int64_t timestamp = 0;

    bool operator==(const InteractionRecord&) const = default;
};

struct UserAttributes {
    UserId user_id;
    bool verified = false;

    bool operator==(const UserAttributes&) const = default;
};

/// Half-open window [start, end) split into `epochs` equal intervals; the last
/// epoch absorbs the remainder when the length is not divisible.
struct TargetPeriod {
    std::int64_t start = 0;
    std::int64_t end = 1;
    int epochs = 1;

    void validate() const;
    bool contains(std::int64_t timestamp) const { return timestamp >= start && timestamp < end; }
    std::int64_t epoch_length() const { return (end - start) / epochs; }
    /// Zero-based epoch of an in-period timestamp.
    int epoch_of(std::int64_t timestamp) const;
};

struct DropCounts {
    std::size_t malformed = 0;
    std::size_t out_of_period = 0;
    std::size_t self_interaction = 0;

    std::size_t total() const { return malformed + out_of_period + self_interaction; }
};

struct ParsedLog {
    std::vector<InteractionRecord> records;
    DropCounts dropped;
    std::vector<std::string> warnings;
};

/// Reads `source,target,kind,timestamp` lines. Comments (`#`) and blank lines
/// are ignored; malformed, out-of-period and self-interaction lines are dropped
/// and counted.
ParsedLog parse_interaction_log(std::istream& in, const TargetPeriod& period);
ParsedLog read_interaction_log(const std::filesystem::path& path, const TargetPeriod& period);

void write_interaction_log(std::ostream& out, std::span<const InteractionRecord> records);

/// Reads `user_id,verified` lines. Duplicate ids are a ValidationError.
std::vector<UserAttributes> parse_user_attributes(std::istream& in);
std::vector<UserAttributes> read_user_attributes(const std::filesystem::path& path);

void write_user_attributes(std::ostream& out, std::span<const UserAttributes> attrs);

// --- synthetic data ---------------------------------------------------------

struct InteractionCountDistribution {
    enum class Kind { constant, geometric };
    Kind kind = Kind::geometric;
    double mean = 1.0;

    /// "const:<k>" or "geometric:<mean>".
    static InteractionCountDistribution parse(std::string_view text);
    std::string to_string() const;
};

struct SyntheticSpec {
    std::size_t node_count = 1000;
    /// Target exponent of the in-degree tail. Must exceed 2 (finite mean degree).
    double degree_exponent = 2.5;
    double mean_out_degree = 5.0;
    InteractionCountDistribution interactions_per_edge;
    std::uint64_t rng_seed = 1;
    TargetPeriod period{0, 90 * 86400, 90};
    /// Fraction of users, highest in-degree first, flagged verified.
    double verified_fraction = 0.05;
    /// Probability that an attachment edge is answered by a reverse edge.
    double reciprocity = 0.3;

    void validate() const;
};

struct SyntheticData {
    std::vector<InteractionRecord> records;
    std::vector<UserAttributes> attributes;
};

/// Edge skeleton of a synthetic graph over users 0..node_count-1.
struct SyntheticTopology {
    std::vector<std::pair<NodeIndex, NodeIndex>> edges;
    std::vector<char> verified;
};

/// Directed preferential attachment (Price model with initial attractiveness
/// chosen for the requested exponent) plus reciprocal reply edges.
SyntheticTopology generate_topology(const SyntheticSpec& spec);

/// Replays the interactions of every topology edge, in edge order. Each edge
/// carries a random number of interactions at uniform in-period timestamps.
void for_each_synthetic_interaction(
    const SyntheticSpec& spec, const SyntheticTopology& topology,
    const std::function<void(std::size_t edge, InteractionKind kind, std::int64_t timestamp)>& visit);

/// Materialized log + attributes for the two functions above.
SyntheticData generate_powerlaw_graph(const SyntheticSpec& spec);

/// Zero-padded synthetic user id.
std::string synthetic_user_id(std::size_t index, std::size_t node_count);

} // namespace truetop
