#include "fashsent/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fashsent/rng.hpp"
#include "fashsent/text_clean.hpp"

namespace fashsent {

using nlohmann::ordered_json;

const char* region_role_name(RegionRole role) {
    switch (role) {
    case RegionRole::global: return "global";
    case RegionRole::face: return "face";
    case RegionRole::item: return "item";
    }
    throw DataError("bad region role");
}

RegionRole parse_region_role(const std::string& name) {
    if (name == "global") return RegionRole::global;
    if (name == "face") return RegionRole::face;
    if (name == "item") return RegionRole::item;
    throw ParseError("unknown region role '" + name + "'");
}

const std::vector<std::string>& attribute_class_names() {
    static const std::vector<std::string> names = {
        "category",  "top_category", "subcategory", "layers",    "style",
        "cut",       "color",        "pattern",     "age",       "material",
        "length",    "neckline",     "gender",      "sleeves",   "gemstones",
        "fit",       "hood",         "height",      "embellishment", "type",
    };
    return names;
}

int attribute_class_id(const std::string& name) {
    std::string norm;
    norm.reserve(name.size());
    for (char c : name) {
        if (c == ' ' || c == '-') norm.push_back('_');
        else norm.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    const auto& names = attribute_class_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == norm) return static_cast<int>(i);
    throw DataError("unknown attribute class '" + name + "'");
}

const Region* PostRecord::global_region() const {
    for (const auto& r : regions)
        if (r.role == RegionRole::global) return &r;
    return nullptr;
}

std::vector<Attribute> filter_attributes(const std::vector<Attribute>& attrs, double threshold) {
    std::vector<const Attribute*> best(kAttributeClassCount, nullptr);
    for (const auto& a : attrs) {
        if (a.confidence < threshold) continue;
        if (a.class_id < 0 || a.class_id >= kAttributeClassCount)
            throw DataError("attribute class id " + std::to_string(a.class_id) + " out of range");
        if (!best[a.class_id] || a.confidence > best[a.class_id]->confidence)
            best[a.class_id] = &a;
    }
    std::vector<Attribute> out;
    for (const auto* a : best)
        if (a) out.push_back(*a);
    std::sort(out.begin(), out.end(), [](const Attribute& a, const Attribute& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        return a.class_id < b.class_id;
    });
    return out;
}

std::uint64_t image_fingerprint(const Region& global) {
    std::string bytes;
    bytes.reserve(global.features.size() * 8);
    for (double v : global.features) {
        const auto scaled = static_cast<std::int64_t>(std::llround(v * 1e6));
        for (int b = 0; b < 8; ++b)
            bytes.push_back(static_cast<char>((static_cast<std::uint64_t>(scaled) >> (8 * b)) & 0xFF));
    }
    return fnv1a64(bytes);
}

PostFilter::Decision PostFilter::decide(const PostRecord& record) {
    if (record.tokens.size() < 5) return {false, Drop::too_short};
    if (const Region* global = record.global_region()) {
        const std::uint64_t fp = image_fingerprint(*global);
        if (!seen_.insert(fp).second) return {false, Drop::duplicate_image};
    }
    return {true, Drop::none};
}

namespace {

PostRecord parse_record(const ordered_json& j, int line_no, bool require_labels) {
    auto fail = [line_no](const std::string& what) {
        throw ParseError("line " + std::to_string(line_no) + ": " + what);
    };
    PostRecord rec;
    if (!j.is_object()) fail("expected a JSON object");
    if (!j.contains("id") || !j["id"].is_string()) fail("missing string field 'id'");
    rec.id = j["id"].get<std::string>();
    if (!j.contains("text") || !j["text"].is_string()) fail("missing string field 'text'");
    rec.raw_text = j["text"].get<std::string>();
    rec.tokens = clean_text(rec.raw_text);

    int globals = 0;
    if (j.contains("regions")) {
        if (!j["regions"].is_array()) fail("field 'regions' must be an array");
        for (const auto& rj : j["regions"]) {
            Region r;
            if (!rj.contains("role") || !rj["role"].is_string()) fail("region missing 'role'");
            try {
                r.role = parse_region_role(rj["role"].get<std::string>());
            } catch (const ParseError& e) {
                fail(e.what());
            }
            if (!rj.contains("vec") || !rj["vec"].is_array()) fail("region missing 'vec'");
            r.features = rj["vec"].get<std::vector<double>>();
            if (static_cast<int>(r.features.size()) != kVisionDim)
                fail("region 'vec' has width " + std::to_string(r.features.size()) +
                     ", expected " + std::to_string(kVisionDim));
            if (r.role == RegionRole::global && ++globals > 1)
                fail("more than one global region");
            rec.regions.push_back(std::move(r));
        }
    }
    if (j.contains("attributes")) {
        if (!j["attributes"].is_array()) fail("field 'attributes' must be an array");
        for (const auto& aj : j["attributes"]) {
            Attribute a;
            if (!aj.contains("class") || !aj["class"].is_string()) fail("attribute missing 'class'");
            try {
                a.class_id = attribute_class_id(aj["class"].get<std::string>());
            } catch (const DataError& e) {
                fail(e.what());
            }
            if (!aj.contains("value") || !aj["value"].is_string()) fail("attribute missing 'value'");
            a.value = aj["value"].get<std::string>();
            if (!aj.contains("confidence") || !aj["confidence"].is_number())
                fail("attribute missing numeric 'confidence'");
            a.confidence = aj["confidence"].get<double>();
            if (a.confidence < 0.0 || a.confidence > 1.0)
                fail("attribute confidence " + std::to_string(a.confidence) + " outside [0, 1]");
            rec.attributes.push_back(std::move(a));
        }
    }
    if (j.contains("label") && !j["label"].is_null()) {
        if (j["label"].is_number_integer()) {
            const int v = j["label"].get<int>();
            if (v < 0 || v >= kClassCount) fail("label " + std::to_string(v) + " outside {0,1,2}");
            rec.label = v;
        } else if (j["label"].is_string()) {
            try {
                rec.label = parse_label(j["label"].get<std::string>());
            } catch (const LabelError& e) {
                fail(e.what());
            }
        } else {
            fail("label must be an integer or string");
        }
    } else if (require_labels) {
        fail("missing field 'label'");
    }
    return rec;
}

} // namespace

std::vector<PostRecord> load_dataset(const std::string& path, bool require_labels) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::vector<PostRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ParseError("line " + std::to_string(line_no) + ": invalid JSON");
        records.push_back(parse_record(j, line_no, require_labels));
    }
    return records;
}

void save_dataset(const std::string& path, const std::vector<PostRecord>& records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write dataset file: " + path);
    for (const auto& rec : records) {
        ordered_json j;
        j["id"] = rec.id;
        j["text"] = rec.raw_text;
        j["regions"] = ordered_json::array();
        for (const auto& r : rec.regions) {
            ordered_json rj;
            rj["role"] = region_role_name(r.role);
            rj["vec"] = r.features;
            j["regions"].push_back(std::move(rj));
        }
        j["attributes"] = ordered_json::array();
        for (const auto& a : rec.attributes) {
            ordered_json aj;
            aj["class"] = attribute_class_names()[a.class_id];
            aj["value"] = a.value;
            aj["confidence"] = a.confidence;
            j["attributes"].push_back(std::move(aj));
        }
        if (rec.label) j["label"] = *rec.label;
        out << j.dump() << '\n';
    }
}

DatasetSplit split_dataset(std::vector<PostRecord> records, std::uint64_t seed) {
    if (records.size() < 10)
        throw DataError("split requires at least 10 records, got " +
                        std::to_string(records.size()));
    DetRng rng(derive_seed(seed, 0x5b17));
    rng.shuffle(records);
    const std::size_t n = records.size();
    const std::size_t val_n = n / 10;
    const std::size_t test_n = n / 10;
    const std::size_t train_n = n - val_n - test_n;
    DatasetSplit split;
    split.seed = seed;
    split.train.assign(records.begin(), records.begin() + train_n);
    split.val.assign(records.begin() + train_n, records.begin() + train_n + val_n);
    split.test.assign(records.begin() + train_n + val_n, records.end());
    return split;
}

} // namespace fashsent
