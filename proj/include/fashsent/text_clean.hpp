#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fashsent {

// Shipped emoji table: single codepoints mapped to ascii token names.
// Codepoints in the emoji ranges that are not in the table are removed.
const char* emoji_token(char32_t cp); // nullptr when unmapped
bool is_emoji_codepoint(char32_t cp);
std::size_t emoji_table_size();

// Social-media text cleaning:
//   emoji -> table tokens (unknown emoji dropped), @-mentions and URLs
//   removed, ascii lowercased, whitespace tokenized, leading/trailing
//   punctuation split into separate tokens ('#' stays on hashtags, '_' is a
//   word character), hashtags beyond the first five dropped, capped at 64
//   tokens. Idempotent on its own output.
std::vector<std::string> clean_text(const std::string& raw);

// Language translation hook. The cleaning pipeline calls this before
// tokenizing; the default implementation is the identity.
std::string translate_text(const std::string& text);

std::string join_tokens(const std::vector<std::string>& tokens);

} // namespace fashsent
