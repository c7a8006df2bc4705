#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "fashsent/common.hpp"

namespace fashsent {

enum class RegionRole { global, face, item };
const char* region_role_name(RegionRole role);
RegionRole parse_region_role(const std::string& name);

struct Region {
    RegionRole role = RegionRole::global;
    std::vector<double> features; // width kVisionDim
};

struct Attribute {
    int class_id = 0; // index into the 20-class vocabulary
    std::string value;
    double confidence = 0.0;
};

// The 20 fashion attribute classes in canonical slot order.
const std::vector<std::string>& attribute_class_names();
int attribute_class_id(const std::string& name); // DataError when unknown

struct PostRecord {
    std::string id;
    std::string raw_text;
    std::vector<std::string> tokens; // clean_text(raw_text)
    std::vector<Region> regions;
    std::vector<Attribute> attributes;
    std::optional<int> label;

    const Region* global_region() const;
};

// Confidence filter: drops entries below the threshold, keeps the highest
// confidence entry per class, sorts by confidence descending (ties by class).
std::vector<Attribute> filter_attributes(const std::vector<Attribute>& attrs,
                                         double threshold = 0.5);

// Sequential keep/drop filter over cleaned records: posts with fewer than 5
// tokens are dropped, as is any record whose global-region fingerprint was
// already kept.
class PostFilter {
public:
    enum class Drop { none, too_short, duplicate_image };
    struct Decision {
        bool keep = true;
        Drop reason = Drop::none;
    };
    Decision decide(const PostRecord& record);

private:
    std::unordered_set<std::uint64_t> seen_;
};

// 64-bit fingerprint of the global region feature rounded to 6 decimals.
std::uint64_t image_fingerprint(const Region& global);

// One JSON object per line:
//   {"id", "text", "regions":[{"role","vec":[512 numbers]}],
//    "attributes":[{"class","value","confidence"}], "label"?}
// Tokens are recomputed from "text" on load. ParseError (with line number)
// on malformed lines; require_labels makes a missing label an error.
std::vector<PostRecord> load_dataset(const std::string& path, bool require_labels = false);
void save_dataset(const std::string& path, const std::vector<PostRecord>& records);

struct DatasetSplit {
    std::vector<PostRecord> train;
    std::vector<PostRecord> val;
    std::vector<PostRecord> test;
    std::uint64_t seed = 0;
};

// Deterministic shuffle by seed, then 80/10/10 with floor rounding; the
// remainder goes to train. DataError for fewer than 10 records.
DatasetSplit split_dataset(std::vector<PostRecord> records, std::uint64_t seed);

} // namespace fashsent
