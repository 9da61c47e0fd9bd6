// SPDX-License-Identifier: Apache-2.0
#include "audioinsight/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "audioinsight/common.hpp"

namespace fs = std::filesystem;

namespace audioinsight {

namespace {

std::string normalize_token(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '-' || c == '_' || c == ' ') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

const std::vector<std::string> kHeader = {"clip_path", "clip_id",    "participant_id",
                                          "group_id",  "duration_s", "partners",
                                          "threat"};

}  // namespace

std::string to_string(Partners p) {
    return p == Partners::Dyadic ? "dyadic" : "group";
}

std::string to_string(Threat t) {
    return t == Threat::Evaluative ? "evaluative" : "not_explicit";
}

Partners parse_partners(const std::string& s) {
    const std::string t = normalize_token(s);
    if (t == "dyadic") return Partners::Dyadic;
    if (t == "group") return Partners::Group;
    throw Error("unknown label for partners: '" + s + "'");
}

Threat parse_threat(const std::string& s) {
    const std::string t = normalize_token(s);
    if (t == "evaluative") return Threat::Evaluative;
    if (t == "notexplicit" || t == "notexplicitlyevaluative") return Threat::NotExplicit;
    throw Error("unknown label for threat: '" + s + "'");
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path);
    const fs::path base = fs::path(path).parent_path();

    std::string line;
    if (!std::getline(in, line)) throw Error("empty manifest: " + path);
    auto header = split_csv_line(line);
    if (header.size() != kHeader.size())
        throw Error("manifest header has " + std::to_string(header.size()) +
                    " columns, expected " + std::to_string(kHeader.size()));
    for (size_t i = 0; i < kHeader.size(); ++i)
        if (normalize_token(header[i]) != normalize_token(kHeader[i]))
            throw Error("missing or misplaced manifest column '" + kHeader[i] + "'");

    DatasetManifest m;
    std::unordered_set<std::string> seen_ids;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv_line(line);
        if (f.size() != kHeader.size())
            throw Error("manifest line " + std::to_string(line_no) + " has " +
                        std::to_string(f.size()) + " fields");
        ManifestEntry e;
        fs::path cp(f[0]);
        e.clip_path = cp.is_absolute() ? cp.string() : (base / cp).string();
        e.clip_id = f[1];
        e.participant_id = f[2];
        e.group_id = f[3];
        try {
            e.duration_s = std::stod(f[4]);
        } catch (const std::exception&) {
            throw Error("bad duration_s on line " + std::to_string(line_no));
        }
        if (e.duration_s <= 0.0)
            throw Error("duration_s must be > 0 on line " + std::to_string(line_no));
        e.label.partners = parse_partners(f[5]);
        e.label.threat = parse_threat(f[6]);
        if (!seen_ids.insert(e.clip_id).second)
            throw Error("duplicate clip_id '" + e.clip_id + "' in manifest");
        m.entries.push_back(std::move(e));
    }
    return m;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
    std::ostringstream out;
    out << "clip_path,clip_id,participant_id,group_id,duration_s,partners,threat\n";
    const fs::path base = fs::path(path).parent_path();
    for (const auto& e : m.entries) {
        fs::path cp(e.clip_path);
        std::error_code ec;
        fs::path rel = fs::relative(cp, base, ec);
        std::string shown = (!ec && !rel.empty() && rel.native()[0] != '.')
                                ? rel.generic_string()
                                : cp.generic_string();
        char dur[32];
        std::snprintf(dur, sizeof(dur), "%.3f", e.duration_s);
        out << shown << ',' << e.clip_id << ',' << e.participant_id << ',' << e.group_id << ','
            << dur << ',' << to_string(e.label.partners) << ',' << to_string(e.label.threat)
            << '\n';
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write manifest: " + path);
    const std::string s = out.str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

}  // namespace audioinsight
