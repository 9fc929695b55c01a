#include "pointmotion/bvh.hpp"

#include <array>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pointmotion/io.hpp"

namespace pointmotion {

namespace {

class TokenStream {
public:
    TokenStream(const std::string& text, const std::string& origin) : origin_(origin) {
        std::istringstream lines(text);
        std::string line;
        int line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            std::istringstream ss(line);
            std::string tok;
            while (ss >> tok) {
                tokens_.push_back(tok);
                lines_.push_back(line_no);
            }
        }
    }

    bool done() const { return pos_ >= tokens_.size(); }

    const std::string& peek() const {
        if (done()) fail("unexpected end of file");
        return tokens_[pos_];
    }

    std::string take() {
        if (done()) fail("unexpected end of file");
        return tokens_[pos_++];
    }

    void require(const std::string& expected) {
        const std::string tok = take();
        if (tok != expected) {
            fail("expected '" + expected + "', got '" + tok + "'");
        }
    }

    double take_double() {
        const std::string tok = take();
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') {
            fail("bad number '" + tok + "'");
        }
        return v;
    }

    long take_long() {
        const std::string tok = take();
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0') {
            fail("bad integer '" + tok + "'");
        }
        return v;
    }

    [[noreturn]] void fail(const std::string& message) const {
        const int line = pos_ < lines_.size() ? lines_[pos_ == 0 ? 0 : pos_ - 1] : 0;
        throw IoError(origin_ + ":" + std::to_string(line) + ": " + message);
    }

private:
    std::string origin_;
    std::vector<std::string> tokens_;
    std::vector<int> lines_;
    std::size_t pos_ = 0;
};

bool is_rotation_channel(const std::string& c) {
    return c == "Xrotation" || c == "Yrotation" || c == "Zrotation";
}

bool is_position_channel(const std::string& c) {
    return c == "Xposition" || c == "Yposition" || c == "Zposition";
}

// Recursive descent over JOINT blocks; `parent` is -1 for the root.
void parse_joint(TokenStream& ts, BvhDocument& doc, int parent) {
    const int index = static_cast<int>(doc.joints.size());
    BvhJoint joint;
    joint.parent = parent;
    joint.name = ts.take();
    doc.joints.push_back(std::move(joint));

    ts.require("{");
    ts.require("OFFSET");
    doc.joints[index].offset = {ts.take_double(), ts.take_double(), ts.take_double()};
    ts.require("CHANNELS");
    const long channel_count = ts.take_long();
    if (channel_count != 3 && channel_count != 6) {
        ts.fail("unsupported channel count " + std::to_string(channel_count) +
                " on joint '" + doc.joints[index].name + "' (3 or 6 supported)");
    }
    for (long c = 0; c < channel_count; ++c) {
        std::string name = ts.take();
        if (!is_rotation_channel(name) && !is_position_channel(name)) {
            ts.fail("unknown channel '" + name + "'");
        }
        doc.joints[index].channels.push_back(std::move(name));
    }

    bool has_child = false;
    while (true) {
        const std::string& next = ts.peek();
        if (next == "JOINT") {
            ts.take();
            has_child = true;
            parse_joint(ts, doc, index);
        } else if (next == "End") {
            ts.take();
            ts.require("Site");
            ts.require("{");
            ts.require("OFFSET");
            doc.joints[index].end_site = {ts.take_double(), ts.take_double(), ts.take_double()};
            ts.require("}");
            has_child = true;
        } else if (next == "}") {
            ts.take();
            break;
        } else {
            ts.fail("unexpected token '" + next + "' inside joint '" + doc.joints[index].name +
                    "'");
        }
    }
    if (!has_child) {
        ts.fail("joint '" + doc.joints[index].name + "' is a leaf without an End Site");
    }
}

}  // namespace

BvhDocument parse_bvh_text(const std::string& text, const std::string& origin) {
    TokenStream ts(text, origin);
    BvhDocument doc;

    ts.require("HIERARCHY");
    ts.require("ROOT");
    parse_joint(ts, doc, -1);

    ts.require("MOTION");
    ts.require("Frames:");
    doc.frame_count = static_cast<int>(ts.take_long());
    ts.require("Frame");
    ts.require("Time:");
    doc.frame_time = ts.take_double();
    if (doc.frame_time <= 0.0) {
        ts.fail("frame time must be positive");
    }

    std::size_t total_channels = 0;
    for (const BvhJoint& j : doc.joints) {
        total_channels += j.channels.size();
    }
    doc.frames.reserve(doc.frame_count);
    for (int t = 0; t < doc.frame_count; ++t) {
        std::vector<double> row;
        row.reserve(total_channels);
        for (std::size_t c = 0; c < total_channels; ++c) {
            if (ts.done()) {
                ts.fail("motion data ends before the declared " +
                        std::to_string(doc.frame_count) + " frames");
            }
            row.push_back(ts.take_double());
        }
        doc.frames.push_back(std::move(row));
    }
    if (!ts.done()) {
        ts.fail("trailing data after the declared frame count");
    }
    return doc;
}

BvhDocument parse_bvh(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path + ": cannot open file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_bvh_text(buffer.str(), path);
}

std::pair<Skeleton, MotionSequence> import_bvh(const BvhDocument& doc,
                                               const BvhImportOptions& options) {
    if (doc.joints.empty()) {
        throw std::invalid_argument("import_bvh: document has no joints");
    }
    const double scale = options.scale_to_meters;
    const int joint_count = static_cast<int>(doc.joints.size());

    Skeleton skel;
    for (int i = 0; i < joint_count; ++i) {
        const BvhJoint& j = doc.joints[i];
        Bone bone;
        bone.name = j.name;
        bone.parent = j.parent;
        bone.head = j.offset * scale;

        // Tail: first child joint's offset, otherwise the End Site.
        std::optional<Vec3> tail;
        for (int c = i + 1; c < joint_count; ++c) {
            if (doc.joints[c].parent == i) {
                tail = doc.joints[c].offset;
                break;
            }
        }
        if (!tail) tail = j.end_site;
        if (!tail) {
            throw std::invalid_argument("import_bvh: joint '" + j.name +
                                        "' has neither children nor an End Site");
        }
        bone.tail = *tail * scale;

        const auto group = options.groups.find(j.name);
        if (group == options.groups.end()) {
            throw std::invalid_argument("import_bvh: no body group mapped for joint '" + j.name +
                                        "'");
        }
        bone.group = group->second;
        const auto ee = options.end_effectors.find(j.name);
        if (ee != options.end_effectors.end()) {
            bone.end_effector = ee->second;
        }
        skel.bones.push_back(std::move(bone));
    }

    // Per joint: rotation channel order tag and the row offsets of its
    // channels.
    std::vector<EulerOrder> orders(joint_count);
    std::vector<std::array<int, 3>> rot_slots(joint_count);
    std::array<int, 3> root_pos_slots{-1, -1, -1};
    int cursor = 0;
    for (int i = 0; i < joint_count; ++i) {
        const BvhJoint& j = doc.joints[i];
        std::string order_tag;
        int rot_seen = 0;
        for (const std::string& c : j.channels) {
            if (is_position_channel(c)) {
                if (i != 0) {
                    throw std::invalid_argument(
                        "import_bvh: translation channels on non-root joint '" + j.name +
                        "' are not supported");
                }
                root_pos_slots[c[0] - 'X'] = cursor;
            } else {
                if (rot_seen == 3) {
                    throw std::invalid_argument("import_bvh: more than 3 rotation channels on '" +
                                                j.name + "'");
                }
                order_tag += static_cast<char>(std::tolower(c[0]));
                rot_slots[i][rot_seen++] = cursor;
            }
            ++cursor;
        }
        if (rot_seen != 3) {
            throw std::invalid_argument("import_bvh: joint '" + j.name +
                                        "' needs exactly 3 rotation channels");
        }
        orders[i] = parse_euler_order(order_tag);  // throws on duplicate axes
    }
    if (doc.joints[0].channels.size() == 6 &&
        (root_pos_slots[0] < 0 || root_pos_slots[1] < 0 || root_pos_slots[2] < 0)) {
        throw std::invalid_argument("import_bvh: root needs all three position channels");
    }

    MotionSequence motion;
    motion.frame_rate = 1.0 / doc.frame_time;
    motion.bone_count = joint_count;
    motion.root_positions.reserve(doc.frame_count);
    motion.rotations.reserve(static_cast<std::size_t>(doc.frame_count) * joint_count);

    for (int t = 0; t < doc.frame_count; ++t) {
        const std::vector<double>& row = doc.frames[t];
        Vec3 root = doc.joints[0].offset;
        if (root_pos_slots[0] >= 0) {
            root += Vec3{row[root_pos_slots[0]], row[root_pos_slots[1]], row[root_pos_slots[2]]};
        }
        motion.root_positions.push_back(root * scale);
        for (int i = 0; i < joint_count; ++i) {
            const double angles[3] = {row[rot_slots[i][0]], row[rot_slots[i][1]],
                                      row[rot_slots[i][2]]};
            Quat local = euler_to_quat(angles, orders[i]);
            const Quat global = doc.joints[i].parent < 0
                                    ? local
                                    : motion.rotation(t, doc.joints[i].parent) * local;
            motion.rotations.push_back(global);
        }
    }
    return {std::move(skel), std::move(motion)};
}

}  // namespace pointmotion
