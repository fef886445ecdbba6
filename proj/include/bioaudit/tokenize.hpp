#pragma once

// Tokenization for biography summaries. Rules: sentences split on .!?
// runs followed by whitespace (or end of text); tokens split on ASCII
// whitespace and punctuation, except an apostrophe between two word
// characters ("women's" stays one token). Bytes >= 0x80 (multi-byte
// UTF-8) count as word characters, so accented names survive intact.
// Lowercasing is ASCII-only; non-English casing is out of scope.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace bioaudit {

inline bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

inline std::string ascii_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s)
        out.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    return out;
}

// Tokens of one sentence, original case preserved.
using Sentence = std::vector<std::string>;

inline std::vector<Sentence> tokenize_sentences(std::string_view text) {
    std::vector<Sentence> sentences;
    Sentence current;
    std::string token;

    auto flush_token = [&] {
        if (!token.empty()) {
            current.push_back(token);
            token.clear();
        }
    };
    auto flush_sentence = [&] {
        flush_token();
        if (!current.empty()) {
            sentences.push_back(std::move(current));
            current.clear();
        }
    };

    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_word_byte(c)) {
            token.push_back(static_cast<char>(c));
            continue;
        }
        if (c == '\'' && !token.empty() && i + 1 < n &&
            is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
            token.push_back('\'');
            continue;
        }
        if (c == '.' || c == '!' || c == '?') {
            // Consume the punctuation run, then break iff whitespace/end follows.
            std::size_t j = i;
            while (j + 1 < n) {
                const unsigned char d = static_cast<unsigned char>(text[j + 1]);
                if (d == '.' || d == '!' || d == '?') ++j; else break;
            }
            const bool at_end = (j + 1 >= n);
            const bool before_space =
                !at_end && std::isspace(static_cast<unsigned char>(text[j + 1])) != 0;
            if (at_end || before_space) flush_sentence(); else flush_token();
            i = j;
            continue;
        }
        flush_token();
    }
    flush_sentence();
    return sentences;
}

inline std::vector<std::string> tokenize_flat(std::string_view text) {
    std::vector<std::string> out;
    for (auto& sentence : tokenize_sentences(text))
        for (auto& tok : sentence) out.push_back(std::move(tok));
    return out;
}

}  // namespace bioaudit
