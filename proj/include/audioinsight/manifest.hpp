// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace audioinsight {

enum class Partners { Dyadic, Group };
enum class Threat { Evaluative, NotExplicit };

struct ContextLabel {
    Partners partners = Partners::Dyadic;
    Threat threat = Threat::NotExplicit;

    bool operator==(const ContextLabel&) const = default;
};

std::string to_string(Partners p);
std::string to_string(Threat t);
Partners parse_partners(const std::string& s);  // case-insensitive
Threat parse_threat(const std::string& s);

struct ManifestEntry {
    std::string clip_path;  // absolute after loading
    std::string clip_id;
    std::string participant_id;
    std::string group_id;
    double duration_s = 0.0;
    ContextLabel label;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
};

// CSV with header clip_path,clip_id,participant_id,group_id,duration_s,partners,threat.
// Relative clip paths are resolved against the manifest's directory.
DatasetManifest load_manifest(const std::string& path);

// Writes the same CSV format; clip paths are emitted relative to the
// manifest directory when possible.
void save_manifest(const DatasetManifest& m, const std::string& path);

}  // namespace audioinsight
