#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace fashsent {

// Sentiment classes. Scores and confusion matrices are indexed in this order.
enum Label : int { kPositive = 0, kNegative = 1, kNeutral = 2 };
inline constexpr int kClassCount = 3;

inline constexpr int kTextDim = 900;       // concatenated word embedding width
inline constexpr int kSubTableDim = 300;   // width of one embedding sub-table
inline constexpr int kSubTableCount = 3;
inline constexpr int kVisionDim = 512;     // region feature width
inline constexpr int kMaxRegions = 8;
inline constexpr int kMaxTokens = 64;
inline constexpr int kAttributeClassCount = 20;

// A branch's (or the fused) 3-class probability vector as plain values.
using ScoreVector = std::array<double, kClassCount>;

class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateMaskError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LabelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const char* label_name(int label);
int parse_label(const std::string& text);

} // namespace fashsent
