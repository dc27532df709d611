#include "truetop/ingest.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace truetop {

std::string_view to_string(InteractionKind kind) {
    switch (kind) {
    case InteractionKind::retweet:
        return "retweet";
    case InteractionKind::reply:
        return "reply";
    case InteractionKind::mention:
        return "mention";
    }
    return "retweet";
}

std::optional<InteractionKind> parse_interaction_kind(std::string_view text) {
    if (text == "retweet") {
        return InteractionKind::retweet;
    }
    if (text == "reply") {
        return InteractionKind::reply;
    }
    if (text == "mention") {
        return InteractionKind::mention;
    }
    return std::nullopt;
}

void TargetPeriod::validate() const {
    if (epochs < 1) {
        throw ValidationError("epoch count must be >= 1");
    }
    if (start >= end) {
        throw ValidationError("target period must satisfy start < end");
    }
    if (end - start < epochs) {
        throw ValidationError("target period shorter than its epoch count");
    }
}

int TargetPeriod::epoch_of(std::int64_t timestamp) const {
    auto index = (timestamp - start) / epoch_length();
    return index >= epochs ? epochs - 1 : static_cast<int>(index);
}

namespace {

std::string warn_line(std::size_t line_no, std::string_view what) {
    return "line " + std::to_string(line_no) + ": " + std::string(what);
}

} // namespace

ParsedLog parse_interaction_log(std::istream& in, const TargetPeriod& period) {
    period.validate();
    ParsedLog out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        auto fields = split(view, ',');
        if (fields.size() != 4) {
            ++out.dropped.malformed;
            out.warnings.push_back(warn_line(line_no, "expected 4 fields"));
            continue;
        }
        auto source = trim(fields[0]);
        auto target = trim(fields[1]);
        auto kind = parse_interaction_kind(trim(fields[2]));
        if (source.empty() || target.empty() || !kind) {
            ++out.dropped.malformed;
            out.warnings.push_back(warn_line(line_no, "bad user id or interaction kind"));
            continue;
        }
        std::int64_t timestamp = 0;
        try {
            timestamp = parse_int64(fields[3]);
        } catch (const ValidationError&) {
            ++out.dropped.malformed;
            out.warnings.push_back(warn_line(line_no, "bad timestamp"));
            continue;
        }
        if (!period.contains(timestamp)) {
            ++out.dropped.out_of_period;
            continue;
        }
        if (source == target) {
            ++out.dropped.self_interaction;
            continue;
        }
        out.records.push_back({std::string(source), std::string(target), *kind, timestamp});
    }
    if (in.bad()) {
        throw IoError("failed while reading interaction log");
    }
    return out;
}

ParsedLog read_interaction_log(const std::filesystem::path& path, const TargetPeriod& period) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open interaction log " + path.string());
    }
    return parse_interaction_log(in, period);
}

void write_interaction_log(std::ostream& out, std::span<const InteractionRecord> records) {
    for (const auto& r : records) {
        out << r.source << ',' << r.target << ',' << to_string(r.kind) << ',' << r.timestamp << '\n';
    }
}

std::vector<UserAttributes> parse_user_attributes(std::istream& in) {
    std::vector<UserAttributes> attrs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        auto fields = split(view, ',');
        auto flag = fields.size() == 2 ? trim(fields[1]) : std::string_view{};
        if (fields.size() != 2 || trim(fields[0]).empty() || (flag != "0" && flag != "1")) {
            throw ValidationError(warn_line(line_no, "expected user_id,verified with verified in {0,1}"));
        }
        std::string id(trim(fields[0]));
        if (!seen.insert(id).second) {
            throw ValidationError(warn_line(line_no, "duplicate user id " + id));
        }
        attrs.push_back({std::move(id), flag == "1"});
    }
    if (in.bad()) {
        throw IoError("failed while reading user attributes");
    }
    return attrs;
}

std::vector<UserAttributes> read_user_attributes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open attribute file " + path.string());
    }
    return parse_user_attributes(in);
}

void write_user_attributes(std::ostream& out, std::span<const UserAttributes> attrs) {
    for (const auto& a : attrs) {
        out << a.user_id << ',' << (a.verified ? 1 : 0) << '\n';
    }
}

} // namespace truetop
