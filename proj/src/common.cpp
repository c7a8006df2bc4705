#include "fashsent/common.hpp"

namespace fashsent {

const char* label_name(int label) {
    switch (label) {
    case kPositive: return "positive";
    case kNegative: return "negative";
    case kNeutral: return "neutral";
    default: throw LabelError("label " + std::to_string(label) + " outside {0,1,2}");
    }
}

int parse_label(const std::string& text) {
    if (text == "positive" || text == "0") return kPositive;
    if (text == "negative" || text == "1") return kNegative;
    if (text == "neutral" || text == "2") return kNeutral;
    throw LabelError("unknown label '" + text + "'");
}

} // namespace fashsent
