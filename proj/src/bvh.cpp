//
// bvh.cpp
//
// BVH text format: HIERARCHY section (ROOT/JOINT/End Site, OFFSET, CHANNELS)
// and MOTION section ("Frames:", "Frame Time:", whitespace-separated floats).
// Accepts LF and CRLF. Parse errors carry the offending line number.
//

#include "mocap.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <unordered_set>

#include "error.hpp"

namespace gm {

const char* channel_name(Channel c) {
    switch (c) {
    case Channel::Xposition: return "Xposition";
    case Channel::Yposition: return "Yposition";
    case Channel::Zposition: return "Zposition";
    case Channel::Xrotation: return "Xrotation";
    case Channel::Yrotation: return "Yrotation";
    case Channel::Zrotation: return "Zrotation";
    }
    return "?";
}

bool is_rotation_channel(Channel c) {
    return c == Channel::Xrotation || c == Channel::Yrotation || c == Channel::Zrotation;
}

std::size_t Skeleton::channel_count() const {
    std::size_t n = 0;
    for (const Joint& j : joints) n += j.channels.size();
    return n;
}

std::vector<std::size_t> Skeleton::channel_offsets() const {
    std::vector<std::size_t> offsets(joints.size() + 1, 0);
    for (std::size_t i = 0; i < joints.size(); ++i)
        offsets[i + 1] = offsets[i] + joints[i].channels.size();
    return offsets;
}

int Skeleton::find_joint(std::string_view name) const {
    int found = -1;
    for (std::size_t i = 0; i < joints.size(); ++i) {
        if (joints[i].name == name) {
            if (found >= 0) return -2;
            found = static_cast<int>(i);
        }
    }
    return found;
}

void Skeleton::validate() const {
    if (joints.empty()) fail(Errc::invalid_argument, "skeleton has no joints");
    int roots = 0;
    for (std::size_t i = 0; i < joints.size(); ++i) {
        const Joint& j = joints[i];
        if (j.parent < 0)
            ++roots;
        else if (static_cast<std::size_t>(j.parent) >= i)
            fail(Errc::invalid_argument, "joint '" + j.name + "' precedes its parent");
        const std::size_t n = j.channels.size();
        if (n != 0 && n != 3 && n != 6)
            fail(Errc::invalid_argument, "joint '" + j.name + "' has unsupported channel count");
        if (!j.offset.allFinite())
            fail(Errc::invalid_argument, "joint '" + j.name + "' has non-finite offset");
    }
    if (roots != 1) fail(Errc::invalid_argument, "skeleton must have exactly one root");
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;

    void skip_space() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == '\n') {
                ++line;
                ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++pos;
            } else {
                break;
            }
        }
    }

    std::optional<std::string_view> next() {
        skip_space();
        if (pos >= text.size()) return std::nullopt;
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' && text[pos] != '\r' &&
               text[pos] != '\n')
            ++pos;
        return text.substr(start, pos - start);
    }

    // Remainder of the current line, trimmed. Joint names may contain spaces.
    std::string rest_of_line() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != '\n' && text[pos] != '\r') ++pos;
        std::size_t end = pos;
        while (end > start && (text[end - 1] == ' ' || text[end - 1] == '\t')) --end;
        return std::string(text.substr(start, end - start));
    }

    [[noreturn]] void error(const std::string& what) const {
        fail(Errc::parse, "line " + std::to_string(line) + ": " + what);
    }

    std::string_view expect_token(const char* context) {
        auto tok = next();
        if (!tok) error(std::string("unexpected end of input, expected ") + context);
        return *tok;
    }

    void expect_keyword(std::string_view keyword) {
        auto tok = expect_token(std::string(keyword).c_str());
        if (tok != keyword)
            error("expected '" + std::string(keyword) + "', got '" + std::string(tok) + "'");
    }

    double expect_number(const char* context) {
        auto tok = expect_token(context);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            error(std::string("expected ") + context + ", got '" + std::string(tok) + "'");
        if (!std::isfinite(value))
            error(std::string("non-finite value for ") + context);
        return value;
    }

    long expect_integer(const char* context) {
        auto tok = expect_token(context);
        long value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            error(std::string("expected ") + context + ", got '" + std::string(tok) + "'");
        return value;
    }
};

std::optional<Channel> channel_from_name(std::string_view name) {
    if (name == "Xposition") return Channel::Xposition;
    if (name == "Yposition") return Channel::Yposition;
    if (name == "Zposition") return Channel::Zposition;
    if (name == "Xrotation") return Channel::Xrotation;
    if (name == "Yrotation") return Channel::Yrotation;
    if (name == "Zrotation") return Channel::Zrotation;
    return std::nullopt;
}

std::string unique_end_site_name(const Skeleton& skeleton, const std::string& parent_name) {
    std::string base = parent_name + "_end";
    std::string candidate = base;
    int suffix = 2;
    while (skeleton.find_joint(candidate) != -1)
        candidate = base + "_" + std::to_string(suffix++);
    return candidate;
}

} // namespace

BvhDocument parse_bvh(std::string_view text) {
    BvhDocument doc;
    Skeleton& skeleton = doc.skeleton;
    Lexer lex{text};

    lex.expect_keyword("HIERARCHY");

    // Joint blocks, iterative with an explicit parent stack.
    std::vector<int> stack;
    bool seen_root = false;
    for (;;) {
        auto tok = lex.expect_token("ROOT, JOINT, End Site, or MOTION");
        if (tok == "MOTION") {
            if (!stack.empty()) lex.error("unterminated joint block at MOTION");
            if (!seen_root) lex.error("no ROOT before MOTION");
            break;
        }
        if (tok == "}") {
            if (stack.empty()) lex.error("unbalanced '}'");
            stack.pop_back();
            continue;
        }

        Joint joint;
        if (tok == "ROOT") {
            if (seen_root) lex.error("multiple ROOT joints");
            if (!stack.empty()) lex.error("ROOT inside a joint block");
            seen_root = true;
            joint.name = lex.rest_of_line();
        } else if (tok == "JOINT") {
            if (stack.empty()) lex.error("JOINT outside a joint block");
            joint.name = lex.rest_of_line();
        } else if (tok == "End") {
            if (stack.empty()) lex.error("End Site outside a joint block");
            std::string site = lex.rest_of_line();
            if (site != "Site") lex.error("expected 'End Site'");
            joint.end_site = true;
            joint.name = unique_end_site_name(skeleton, skeleton.joints[stack.back()].name);
        } else {
            lex.error("unexpected token '" + std::string(tok) + "'");
        }
        if (joint.name.empty()) lex.error("missing joint name");
        joint.parent = stack.empty() ? -1 : stack.back();

        lex.expect_keyword("{");
        lex.expect_keyword("OFFSET");
        for (int k = 0; k < 3; ++k) joint.offset[k] = lex.expect_number("offset value");

        if (joint.end_site) {
            lex.expect_keyword("}");
            skeleton.joints.push_back(std::move(joint));
            continue;
        }

        lex.expect_keyword("CHANNELS");
        long declared = lex.expect_integer("channel count");
        if (declared != 0 && declared != 3 && declared != 6)
            lex.error("unsupported channel count " + std::to_string(declared));
        std::unordered_set<int> rotation_axes;
        for (long k = 0; k < declared; ++k) {
            auto name = lex.expect_token("channel name");
            auto channel = channel_from_name(name);
            if (!channel) lex.error("unsupported channel name '" + std::string(name) + "'");
            if (is_rotation_channel(*channel) &&
                !rotation_axes.insert(static_cast<int>(*channel)).second)
                lex.error("duplicate rotation channel " + std::string(name));
            joint.channels.push_back(*channel);
        }
        bool has_position = false;
        for (Channel c : joint.channels) has_position |= !is_rotation_channel(c);
        if (has_position && joint.parent >= 0)
            doc.warnings.push_back("joint '" + joint.name +
                                   "' carries position channels but is not the root");

        int index = static_cast<int>(skeleton.joints.size());
        skeleton.joints.push_back(std::move(joint));
        stack.push_back(index);
    }

    skeleton.validate();

    // MOTION section.
    {
        auto tok = lex.expect_token("Frames:");
        if (tok == "Frames") {
            lex.expect_keyword(":");
        } else if (tok != "Frames:") {
            lex.error("expected 'Frames:', got '" + std::string(tok) + "'");
        }
    }
    long frames = lex.expect_integer("frame count");
    if (frames < 0) lex.error("negative frame count");
    {
        lex.expect_keyword("Frame");
        auto tok = lex.expect_token("Time:");
        if (tok == "Time") {
            lex.expect_keyword(":");
        } else if (tok != "Time:") {
            lex.error("expected 'Time:', got '" + std::string(tok) + "'");
        }
    }
    double frame_time = lex.expect_number("frame time");
    if (!(frame_time > 0.0)) lex.error("frame time must be positive");

    MotionClip& clip = doc.clip;
    clip.frame_time = frame_time;
    clip.channel_count = skeleton.channel_count();
    clip.values.reserve(static_cast<std::size_t>(frames) * clip.channel_count);
    for (long f = 0; f < frames; ++f) {
        for (std::size_t c = 0; c < clip.channel_count; ++c) {
            auto tok = lex.next();
            if (!tok)
                lex.error("frame " + std::to_string(f) + " has " + std::to_string(c) +
                          " values, expected " + std::to_string(clip.channel_count));
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(tok->data(), tok->data() + tok->size(), value);
            if (ec != std::errc{} || ptr != tok->data() + tok->size())
                lex.error("bad channel value '" + std::string(*tok) + "'");
            if (!std::isfinite(value)) lex.error("non-finite channel value");
            clip.values.push_back(value);
        }
    }
    if (auto extra = lex.next())
        lex.error("trailing data after " + std::to_string(frames) + " frames: '" +
                  std::string(*extra) + "'");

    return doc;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

// Shortest representation that parses back to the same double.
std::string format_exact(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_joint(std::string& out, const Skeleton& skeleton,
                 const std::vector<std::vector<int>>& children, int index, int depth) {
    const Joint& joint = skeleton.joints[index];
    std::string indent(depth, '\t');
    if (joint.end_site) {
        out += indent + "End Site\n";
    } else if (joint.parent < 0) {
        out += indent + "ROOT " + joint.name + "\n";
    } else {
        out += indent + "JOINT " + joint.name + "\n";
    }
    out += indent + "{\n";
    out += indent + "\tOFFSET " + format_exact(joint.offset[0]) + " " +
           format_exact(joint.offset[1]) + " " + format_exact(joint.offset[2]) + "\n";
    if (!joint.end_site) {
        out += indent + "\tCHANNELS " + std::to_string(joint.channels.size());
        for (Channel c : joint.channels) out += std::string(" ") + channel_name(c);
        out += "\n";
        for (int child : children[index]) write_joint(out, skeleton, children, child, depth + 1);
    }
    out += indent + "}\n";
}

} // namespace

std::string serialize_bvh(const Skeleton& skeleton, const MotionClip& clip) {
    skeleton.validate();
    if (clip.channel_count != skeleton.channel_count())
        fail(Errc::mismatch, "clip channel count " + std::to_string(clip.channel_count) +
                                 " does not match skeleton (" +
                                 std::to_string(skeleton.channel_count()) + ")");

    std::vector<std::vector<int>> children(skeleton.joints.size());
    int root = 0;
    for (std::size_t i = 0; i < skeleton.joints.size(); ++i) {
        int parent = skeleton.joints[i].parent;
        if (parent < 0)
            root = static_cast<int>(i);
        else
            children[parent].push_back(static_cast<int>(i));
    }

    std::string out = "HIERARCHY\n";
    write_joint(out, skeleton, children, root, 0);
    out += "MOTION\n";
    out += "Frames: " + std::to_string(clip.frame_count()) + "\n";
    out += "Frame Time: " + format_exact(clip.frame_time) + "\n";

    char buf[64];
    for (std::size_t f = 0; f < clip.frame_count(); ++f) {
        auto frame = clip.frame(f);
        for (std::size_t c = 0; c < frame.size(); ++c) {
            int n = std::snprintf(buf, sizeof(buf), c ? " %.6f" : "%.6f", frame[c]);
            out.append(buf, n);
        }
        out += "\n";
    }
    return out;
}

} // namespace gm
