#include "fashsent/text_clean.hpp"

#include <cctype>

#include "fashsent/common.hpp"

namespace fashsent {

namespace {

// Decodes one UTF-8 codepoint at `i`, advancing it. Invalid bytes decode as
// U+FFFD and consume one byte.
char32_t decode_utf8(const std::string& s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        if ((byte(i + k) & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (byte(i + k) & 0x3F);
    }
    i += len;
    return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_url_token(const std::string& t) {
    if (t.find("://") != std::string::npos) return true;
    if (t.rfind("www.", 0) == 0) return true;
    if (t.rfind("http", 0) == 0) return true;
    return false;
}

bool is_mention_token(const std::string& t) { return !t.empty() && t[0] == '@'; }

// '_' counts as a word character; everything else in ASCII punct splits off.
bool is_split_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) && c != '_';
}

bool is_hashtag(const std::string& t) { return t.size() > 1 && t[0] == '#'; }

// Peels leading/trailing punctuation runs off a token into separate
// single-character tokens. A leading '#' stays attached when followed by a
// word character (hashtags).
void split_punctuation(const std::string& token, std::vector<std::string>& out) {
    std::size_t begin = 0, end = token.size();
    std::vector<std::string> leading, trailing;
    while (begin < end) {
        const char c = token[begin];
        if (!is_split_punct(c)) break;
        if (c == '#' && begin + 1 < end && !is_split_punct(token[begin + 1])) break;
        leading.emplace_back(1, c);
        ++begin;
    }
    while (end > begin && is_split_punct(token[end - 1]))
        trailing.emplace_back(1, token[--end]);
    for (auto& t : leading) out.push_back(std::move(t));
    if (end > begin) out.push_back(token.substr(begin, end - begin));
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) out.push_back(std::move(*it));
}

} // namespace

std::string translate_text(const std::string& text) { return text; }

std::vector<std::string> clean_text(const std::string& raw) {
    const std::string text = translate_text(raw);

    // emoji pass over codepoints, ascii lowercasing on the way
    std::string flat;
    flat.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = decode_utf8(text, i);
        if (const char* name = emoji_token(cp)) {
            flat.push_back(' ');
            flat += name;
            flat.push_back(' ');
        } else if (is_emoji_codepoint(cp) || cp == 0xFFFD) {
            flat.push_back(' ');
        } else if (cp < 0x80) {
            flat.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
        } else {
            encode_utf8(cp, flat);
        }
    }

    // whitespace tokenize, dropping mentions and links before punctuation
    // splitting so URLs are removed whole
    std::vector<std::string> rough;
    std::size_t pos = 0;
    while (pos < flat.size()) {
        while (pos < flat.size() && std::isspace(static_cast<unsigned char>(flat[pos]))) ++pos;
        std::size_t start = pos;
        while (pos < flat.size() && !std::isspace(static_cast<unsigned char>(flat[pos]))) ++pos;
        if (pos > start) {
            std::string tok = flat.substr(start, pos - start);
            if (!is_mention_token(tok) && !is_url_token(tok)) rough.push_back(std::move(tok));
        }
    }

    std::vector<std::string> split;
    for (const auto& tok : rough) split_punctuation(tok, split);

    // mentions/links can surface again once surrounding punctuation is gone
    std::vector<std::string> tokens;
    int hashtags = 0;
    for (auto& tok : split) {
        if (is_mention_token(tok) || is_url_token(tok)) continue;
        if (is_hashtag(tok)) {
            if (++hashtags > 5) continue;
        }
        tokens.push_back(std::move(tok));
        if (static_cast<int>(tokens.size()) == kMaxTokens) break;
    }
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

} // namespace fashsent
