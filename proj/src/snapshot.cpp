#include "truetop/graph.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace truetop {

namespace {

constexpr std::string_view header_prefix = "#truetop-graph v1 model=";

} // namespace

void write_snapshot(std::ostream& out, const InteractionGraph& g) {
    out << header_prefix << g.model().to_string() << '\n';
    auto edges = g.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        out << edges[e].source << ',' << edges[e].target << ',' << format_double(edges[e].weight) << ',';
        auto dense = g.dense_epoch_counts(e);
        for (std::size_t x = 0; x < dense.size(); ++x) {
            if (x > 0) {
                out << '|';
            }
            out << dense[x];
        }
        out << '\n';
    }
    out << "#users\n";
    for (std::size_t u = 0; u < g.user_count(); ++u) {
        out << g.user_id(static_cast<NodeIndex>(u)) << ',' << (g.verified(static_cast<NodeIndex>(u)) ? 1 : 0)
            << '\n';
    }
}

void write_snapshot(const std::filesystem::path& path, const InteractionGraph& g) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write graph snapshot " + path.string());
    }
    write_snapshot(out, g);
    if (!out) {
        throw IoError("failed writing graph snapshot " + path.string());
    }
}

InteractionGraph read_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || !std::string_view(line).starts_with(header_prefix)) {
        throw ValidationError("not a truetop graph snapshot (bad header)");
    }
    WeightModel model = WeightModel::parse(std::string_view(line).substr(header_prefix.size()));

    std::vector<EdgeInput> edges;
    std::vector<UserId> users;
    std::vector<char> verified;
    int epochs = -1;
    bool in_users = false;
    std::size_t line_no = 1;
    auto fail = [&](std::string_view what) {
        throw ValidationError("snapshot line " + std::to_string(line_no) + ": " + std::string(what));
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty()) {
            continue;
        }
        if (view == "#users") {
            in_users = true;
            continue;
        }
        auto fields = split(view, ',');
        if (in_users) {
            if (fields.size() != 2 || (fields[1] != "0" && fields[1] != "1")) {
                fail("expected user_id,verified");
            }
            users.emplace_back(fields[0]);
            verified.push_back(fields[1] == "1" ? 1 : 0);
            continue;
        }
        if (fields.size() != 4) {
            fail("expected i,j,w,d_1|...|d_mu");
        }
        EdgeInput edge;
        auto source = parse_int64(fields[0]);
        auto target = parse_int64(fields[1]);
        if (source < 0 || target < 0) {
            fail("negative user index");
        }
        edge.source = static_cast<NodeIndex>(source);
        edge.target = static_cast<NodeIndex>(target);
        edge.weight = parse_double(fields[2]);
        auto counts = split(fields[3], '|');
        if (epochs < 0) {
            epochs = static_cast<int>(counts.size());
        } else if (static_cast<int>(counts.size()) != epochs) {
            fail("inconsistent epoch count");
        }
        for (std::size_t x = 0; x < counts.size(); ++x) {
            auto c = parse_int64(counts[x]);
            if (c < 0) {
                fail("negative interaction count");
            }
            if (c > 0) {
                edge.counts.push_back({static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(c)});
            }
        }
        edges.push_back(std::move(edge));
    }
    if (in.bad()) {
        throw IoError("failed while reading graph snapshot");
    }
    if (epochs < 0) {
        epochs = model.kind == WeightModelKind::entropy ? model.epochs : 1;
    }
    return InteractionGraph::from_edges(std::move(users), std::move(verified), model, epochs, std::move(edges));
}

InteractionGraph read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open graph snapshot " + path.string());
    }
    return read_snapshot(in);
}

} // namespace truetop
