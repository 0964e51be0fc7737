#pragma once

/*
 * Minimal JSON emitter. Doubles are printed with 17 significant digits so
 * every value round-trips bit-exactly and repeated runs diff clean; the
 * generic library serializers shorten doubles, which breaks that guarantee.
 */

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qwalk/errors.hpp"

namespace qwalk {

class JsonWriter {
  public:
    void begin_object() { open('{', false); }
    void end_object() { close('}'); }
    // inline_items packs scalar members onto one line: [0, 1, 1.5]
    void begin_array(bool inline_items = false) { open('[', inline_items); }
    void end_array() { close(']'); }

    void key(const std::string& k) {
        separator();
        append_escaped(k);
        out_ += ": ";
        keyed_ = true;
    }

    void value(double v) {
        if (!std::isfinite(v)) throw NumericalError("non-finite value in JSON output");
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        token(buf);
    }
    void value(int v) { value(static_cast<long long>(v)); }
    void value(long long v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", v);
        token(buf);
    }
    void value(unsigned long long v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%llu", v);
        token(buf);
    }
    void value(const std::string& s) {
        separator();
        append_escaped(s);
    }
    void value(const char* s) { value(std::string(s)); }
    void value(bool b) { token(b ? "true" : "false"); }

    std::string str() const { return out_ + "\n"; }

  private:
    struct Level {
        bool inline_items;
        bool has_items;
    };

    void token(const char* s) {
        separator();
        out_ += s;
    }

    void separator() {
        if (keyed_) {
            keyed_ = false;
            return;
        }
        if (levels_.empty()) return;
        Level& l = levels_.back();
        if (l.inline_items) {
            if (l.has_items) out_ += ", ";
        } else {
            out_ += l.has_items ? ",\n" : "\n";
            out_.append(2 * levels_.size(), ' ');
        }
        l.has_items = true;
    }

    void open(char ch, bool inline_items) {
        separator();
        out_ += ch;
        levels_.push_back({inline_items, false});
    }

    void close(char ch) {
        const Level l = levels_.back();
        levels_.pop_back();
        if (l.has_items && !l.inline_items) {
            out_ += '\n';
            out_.append(2 * levels_.size(), ' ');
        }
        out_ += ch;
    }

    void append_escaped(const std::string& s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_ += c;
                    }
            }
        }
        out_ += '"';
    }

    std::string out_;
    std::vector<Level> levels_;
    bool keyed_ = false;
};

}  // namespace qwalk
