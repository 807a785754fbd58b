#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace csi::text {

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

// Lowercases ASCII letters only; multi-byte UTF-8 sequences pass through.
inline std::string fold_ascii(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(ascii_lower(c));
    return out;
}

inline std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(s.substr(start));
            break;
        }
        std::string_view line = s.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

inline std::vector<std::string> split(std::string_view s, std::string_view sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t end = s.find(sep, start);
        if (end == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            break;
        }
        parts.emplace_back(s.substr(start, end - start));
        start = end + sep.size();
    }
    return parts;
}

// Decodes the UTF-8 sequence starting at s[i]; advances i past it.
// Invalid bytes decode as themselves (one byte at a time).
inline std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    auto cont = [&](std::size_t k) {
        return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    };
    if (b0 < 0x80) {
        i += 1;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0 && cont(1)) {
        std::uint32_t cp = (b0 & 0x1Fu) << 6 | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
        i += 2;
        return cp;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
        std::uint32_t cp = (b0 & 0x0Fu) << 12 | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6 |
                           (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
        i += 3;
        return cp;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
        std::uint32_t cp = (b0 & 0x07u) << 18 | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12 |
                           (static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6 |
                           (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
        i += 4;
        return cp;
    }
    i += 1;
    return b0;
}

inline void encode_utf8(std::uint32_t cp, std::string& out) {
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

// Maps full-width and CJK punctuation to ASCII equivalents so that EN and ZH
// model output can share one matching path. Codepoints without a mapping pass
// through unchanged.
inline std::uint32_t ascii_equivalent(std::uint32_t cp) {
    switch (cp) {
        case 0x3000: return ' ';   // ideographic space
        case 0xFF1A: return ':';   // ：
        case 0xFF0C: return ',';   // ，
        case 0xFF0E: return '.';   // ．
        case 0xFF0D: return '-';   // －
        case 0xFF08: return '(';   // （
        case 0xFF09: return ')';   // ）
        case 0xFF1B: return ';';   // ；
        case 0xFF01: return '!';   // ！
        case 0xFF1F: return '?';   // ？
        case 0x3001: return ',';   // 、
        case 0x3002: return '.';   // 。
        case 0x00B7: return '-';   // ·
        case 0x30FB: return '-';   // ・
        case 0x2013: return '-';   // –
        case 0x2014: return '-';   // —
        case 0x2015: return '-';   // ―
        case 0x2018: return '\'';  // ‘
        case 0x2019: return '\'';  // ’
        case 0x201C: return '"';   // “
        case 0x201D: return '"';   // ”
        case 0x300C: return '"';   // 「
        case 0x300D: return '"';   // 」
        case 0x300E: return '"';   // 『
        case 0x300F: return '"';   // 』
        case 0x3008: return '"';   // 〈
        case 0x3009: return '"';   // 〉
        case 0x300A: return '"';   // 《
        case 0x300B: return '"';   // 》
        case 0x2022: return '-';   // •
        case 0x25CF: return '-';   // ●
        case 0x25CB: return '-';   // ○
        case 0x2605: return '-';   // ★
        default:
            if (cp >= 0xFF10 && cp <= 0xFF19) return '0' + (cp - 0xFF10);  // ０-９
            if (cp >= 0xFF21 && cp <= 0xFF3A) return 'A' + (cp - 0xFF21);  // Ａ-Ｚ
            if (cp >= 0xFF41 && cp <= 0xFF5A) return 'a' + (cp - 0xFF41);  // ａ-ｚ
            return cp;
    }
}

inline std::string normalize_width(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        std::uint32_t cp = decode_utf8(s, i);
        encode_utf8(ascii_equivalent(cp), out);
    }
    return out;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

inline bool contains(std::string_view s, std::string_view needle) {
    return s.find(needle) != std::string_view::npos;
}

inline std::size_t count_occurrences(std::string_view s, std::string_view needle) {
    if (needle.empty()) return 0;
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = s.find(needle, pos)) != std::string_view::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

}  // namespace csi::text
