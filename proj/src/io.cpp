#include "pointmotion/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pointmotion {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

// Tokenized line reader shared by the text formats.
class LineReader {
public:
    LineReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) {
            throw IoError(path + ": cannot open file");
        }
    }

    // Returns false at end of input; skips blank and comment lines.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            tokens.clear();
            std::istringstream ss(line);
            std::string tok;
            while (ss >> tok) {
                tokens.push_back(tok);
            }
            if (!tokens.empty() && tokens[0][0] != '#') {
                return true;
            }
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw IoError(path_ + ":" + std::to_string(line_no_) + ": " + message);
    }

    double parse_double(const std::string& tok) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') {
            fail("bad number '" + tok + "'");
        }
        return v;
    }

    long parse_long(const std::string& tok) {
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0') {
            fail("bad integer '" + tok + "'");
        }
        return v;
    }

    unsigned long long parse_u64(const std::string& tok) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0') {
            fail("bad integer '" + tok + "'");
        }
        return v;
    }

private:
    std::string path_;
    std::ifstream in_;
    int line_no_ = 0;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(path + ": cannot open file for writing");
    }
    return out;
}

void require_header(LineReader& reader, std::vector<std::string>& tokens,
                    const std::string& magic) {
    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != magic || tokens[1] != "1") {
        reader.fail("expected header '" + magic + " 1'");
    }
}

}  // namespace

void save_skeleton(const Skeleton& s, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "pointmotion-skeleton 1\n";
    out << "units m\n";
    out << "bones " << s.bone_count() << "\n";
    for (const Bone& b : s.bones) {
        out << "bone " << b.name << " parent "
            << (b.is_root() ? std::string("-") : s.bones[b.parent].name) << " head "
            << format_double(b.head.x) << ' ' << format_double(b.head.y) << ' '
            << format_double(b.head.z) << " tail " << format_double(b.tail.x) << ' '
            << format_double(b.tail.y) << ' ' << format_double(b.tail.z) << " group "
            << to_string(b.group);
        if (b.end_effector) {
            out << " ee " << to_string(*b.end_effector);
        }
        out << "\n";
    }
}

Skeleton load_skeleton(const std::string& path) {
    LineReader reader(path);
    std::vector<std::string> tokens;
    require_header(reader, tokens, "pointmotion-skeleton");

    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != "units") {
        reader.fail("expected 'units m'");
    }
    if (tokens[1] != "m") {
        reader.fail("unsupported units '" + tokens[1] + "': only meters (m) are supported");
    }
    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != "bones") {
        reader.fail("expected 'bones <count>'");
    }
    const long count = reader.parse_long(tokens[1]);

    Skeleton s;
    for (long i = 0; i < count; ++i) {
        if (!reader.next(tokens)) {
            reader.fail("unexpected end of file: expected " + std::to_string(count) + " bones");
        }
        if ((tokens.size() != 14 && tokens.size() != 16) || tokens[0] != "bone" ||
            tokens[2] != "parent" || tokens[4] != "head" || tokens[8] != "tail" ||
            tokens[12] != "group") {
            reader.fail("malformed bone record");
        }
        Bone b;
        b.name = tokens[1];
        if (s.find_bone(b.name) >= 0) {
            reader.fail("duplicate bone name '" + b.name + "'");
        }
        if (tokens[3] == "-") {
            b.parent = -1;
        } else {
            b.parent = s.find_bone(tokens[3]);
            if (b.parent < 0) {
                reader.fail("unknown parent bone '" + tokens[3] + "'");
            }
        }
        b.head = {reader.parse_double(tokens[5]), reader.parse_double(tokens[6]),
                  reader.parse_double(tokens[7])};
        b.tail = {reader.parse_double(tokens[9]), reader.parse_double(tokens[10]),
                  reader.parse_double(tokens[11])};
        const auto group = parse_body_group(tokens[13]);
        if (!group) {
            reader.fail("unknown body group '" + tokens[13] + "'");
        }
        b.group = *group;
        if (tokens.size() == 16) {
            if (tokens[14] != "ee") {
                reader.fail("malformed bone record");
            }
            const auto ee = parse_end_effector(tokens[15]);
            if (!ee) {
                reader.fail("unknown end-effector tag '" + tokens[15] + "'");
            }
            b.end_effector = *ee;
        }
        s.bones.push_back(std::move(b));
    }
    if (reader.next(tokens)) {
        reader.fail("unexpected trailing content");
    }
    return s;
}

void save_motion(const MotionSequence& m, const std::string& path,
                 const std::string& skeleton_id) {
    std::ofstream out = open_out(path);
    out << "pointmotion-motion 1\n";
    out << "skeleton " << (skeleton_id.empty() ? "-" : skeleton_id) << "\n";
    out << "frame_rate " << format_double(m.frame_rate) << "\n";
    out << "frames " << m.frame_count() << "\n";
    out << "bones " << m.bone_count << "\n";
    for (int t = 0; t < m.frame_count(); ++t) {
        out << "frame " << format_double(m.root_positions[t].x) << ' '
            << format_double(m.root_positions[t].y) << ' '
            << format_double(m.root_positions[t].z);
        for (int n = 0; n < m.bone_count; ++n) {
            const Quat& q = m.rotation(t, n);
            out << ' ' << format_double(q.w) << ' ' << format_double(q.x) << ' '
                << format_double(q.y) << ' ' << format_double(q.z);
        }
        out << "\n";
    }
}

MotionSequence load_motion(const std::string& path, std::string* skeleton_id) {
    LineReader reader(path);
    std::vector<std::string> tokens;
    require_header(reader, tokens, "pointmotion-motion");

    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != "skeleton") {
        reader.fail("expected 'skeleton <id>'");
    }
    if (skeleton_id) *skeleton_id = tokens[1];
    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != "frame_rate") {
        reader.fail("expected 'frame_rate <fps>'");
    }
    MotionSequence m;
    m.frame_rate = reader.parse_double(tokens[1]);
    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != "frames") {
        reader.fail("expected 'frames <count>'");
    }
    const long frames = reader.parse_long(tokens[1]);
    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != "bones") {
        reader.fail("expected 'bones <count>'");
    }
    m.bone_count = static_cast<int>(reader.parse_long(tokens[1]));

    m.root_positions.reserve(frames);
    m.rotations.reserve(static_cast<std::size_t>(frames) * m.bone_count);
    const std::size_t expected = 4 + static_cast<std::size_t>(m.bone_count) * 4;
    for (long t = 0; t < frames; ++t) {
        if (!reader.next(tokens)) {
            reader.fail("unexpected end of file: expected " + std::to_string(frames) + " frames");
        }
        if (tokens.size() != expected || tokens[0] != "frame") {
            reader.fail("malformed frame record");
        }
        m.root_positions.push_back({reader.parse_double(tokens[1]), reader.parse_double(tokens[2]),
                                    reader.parse_double(tokens[3])});
        for (int n = 0; n < m.bone_count; ++n) {
            const std::size_t base = 4 + static_cast<std::size_t>(n) * 4;
            Quat q{reader.parse_double(tokens[base]), reader.parse_double(tokens[base + 1]),
                   reader.parse_double(tokens[base + 2]), reader.parse_double(tokens[base + 3])};
            if (std::abs(q.norm() - 1.0) > 1e-6) {
                reader.fail("non-unit quaternion for bone " + std::to_string(n));
            }
            m.rotations.push_back(q);
        }
    }
    if (reader.next(tokens)) {
        reader.fail("unexpected trailing content");
    }
    return m;
}

void save_cloud_spec(const CloudSpec& spec, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "pointmotion-cloudspec 1\n";
    out << "skeleton " << (spec.skeleton_id.empty() ? "-" : spec.skeleton_id) << "\n";
    out << "sigma " << format_double(spec.sigma) << "\n";
    out << "seed " << spec.seed << "\n";
    out << "points " << spec.point_count() << "\n";
    for (const PointSpec& p : spec.points) {
        out << "point " << p.bone << ' ' << format_double(p.local_offset.x) << ' '
            << format_double(p.local_offset.y) << ' ' << format_double(p.local_offset.z) << ' '
            << to_string(p.group) << "\n";
    }
}

CloudSpec load_cloud_spec(const std::string& path) {
    LineReader reader(path);
    std::vector<std::string> tokens;
    require_header(reader, tokens, "pointmotion-cloudspec");

    CloudSpec spec;
    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != "skeleton") {
        reader.fail("expected 'skeleton <id>'");
    }
    spec.skeleton_id = tokens[1] == "-" ? "" : tokens[1];
    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != "sigma") {
        reader.fail("expected 'sigma <value>'");
    }
    spec.sigma = reader.parse_double(tokens[1]);
    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != "seed") {
        reader.fail("expected 'seed <value>'");
    }
    spec.seed = reader.parse_u64(tokens[1]);
    if (!reader.next(tokens) || tokens.size() != 2 || tokens[0] != "points") {
        reader.fail("expected 'points <count>'");
    }
    const long count = reader.parse_long(tokens[1]);
    for (long i = 0; i < count; ++i) {
        if (!reader.next(tokens) || tokens.size() != 6 || tokens[0] != "point") {
            reader.fail("malformed point record");
        }
        PointSpec p;
        p.bone = static_cast<int>(reader.parse_long(tokens[1]));
        p.local_offset = {reader.parse_double(tokens[2]), reader.parse_double(tokens[3]),
                          reader.parse_double(tokens[4])};
        const auto group = parse_body_group(tokens[5]);
        if (!group) {
            reader.fail("unknown body group '" + tokens[5] + "'");
        }
        p.group = *group;
        spec.points.push_back(p);
    }
    if (reader.next(tokens)) {
        reader.fail("unexpected trailing content");
    }
    return spec;
}

void save_cloud_trajectory(const CloudTrajectory& traj, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "pointmotion-cloud 1\n";
    out << "points " << traj.point_count << "\n";
    out << "frames " << traj.frame_count() << "\n";
    out << "groups";
    for (BodyGroup g : traj.groups) {
        out << ' ' << to_string(g);
    }
    out << "\n";
    for (int t = 0; t < traj.frame_count(); ++t) {
        out << "frame";
        for (int i = 0; i < traj.point_count; ++i) {
            const Vec3& p = traj.at(t, i);
            out << ' ' << format_double(p.x) << ' ' << format_double(p.y) << ' '
                << format_double(p.z);
        }
        out << "\n";
    }
}

void write_trace(const RetargetTrace& trace, const std::string& path) {
    std::ofstream out = open_out(path);
    for (const TraceEntry& e : trace.entries) {
        nlohmann::json j{{"iteration", e.iteration},
                         {"l_knn_raw", e.breakdown.l_knn_raw},
                         {"l_knn_normalized", e.breakdown.l_knn_normalized},
                         {"l_end", e.breakdown.l_end},
                         {"l_q", e.breakdown.l_q},
                         {"total", e.breakdown.total},
                         {"reassigned", e.reassigned}};
        out << j.dump() << "\n";
    }
}

void write_training_samples(const std::vector<TrainingSample>& samples, const std::string& path) {
    std::ofstream out = open_out(path);
    for (const TrainingSample& s : samples) {
        nlohmann::json j;
        j["interval"] = s.interval;
        j["offset_scale"] = s.offset_scale;
        j["rpa_seed"] = s.rpa_seed;
        j["keyframe_mask"] = s.keyframe_mask;
        nlohmann::json roots = nlohmann::json::array();
        for (const Vec3& p : s.root_positions) {
            roots.push_back({p.x, p.y, p.z});
        }
        j["root_positions"] = std::move(roots);
        nlohmann::json foq = nlohmann::json::array();
        for (const std::vector<Quat>& track : s.foq) {
            nlohmann::json jt = nlohmann::json::array();
            for (const Quat& q : track) {
                jt.push_back({q.w, q.x, q.y, q.z});
            }
            foq.push_back(std::move(jt));
        }
        j["foq"] = std::move(foq);
        out << j.dump() << "\n";
    }
}

std::vector<TrainingSample> read_training_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(path + ": cannot open file");
    }
    std::vector<TrainingSample> samples;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        TrainingSample s;
        s.interval = j.at("interval").get<int>();
        s.offset_scale = j.at("offset_scale").get<double>();
        s.rpa_seed = j.at("rpa_seed").get<std::uint64_t>();
        s.keyframe_mask = j.at("keyframe_mask").get<std::vector<bool>>();
        for (const auto& p : j.at("root_positions")) {
            s.root_positions.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                        p.at(2).get<double>()});
        }
        for (const auto& track : j.at("foq")) {
            std::vector<Quat> quats;
            for (const auto& q : track) {
                quats.push_back({q.at(0).get<double>(), q.at(1).get<double>(),
                                 q.at(2).get<double>(), q.at(3).get<double>()});
            }
            s.foq.push_back(std::move(quats));
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

std::string report_to_json(const ObjectiveBreakdown& breakdown) {
    nlohmann::json j{{"l_knn_raw", breakdown.l_knn_raw},
                     {"l_knn_normalized", breakdown.l_knn_normalized},
                     {"l_knn_normalized_x100", breakdown.l_knn_normalized * 100.0},
                     {"l_end", breakdown.l_end},
                     {"l_q", breakdown.l_q},
                     {"total", breakdown.total},
                     {"end_effector_map_empty", breakdown.end_effector_map_empty},
                     {"weights",
                      {{"knn", breakdown.weights.knn},
                       {"end", breakdown.weights.end},
                       {"q", breakdown.weights.q}}}};
    return j.dump(2);
}

std::string report_to_json(const MetricReport& report) {
    nlohmann::json j{{"l2p", report.l2p}, {"l2q", report.l2q}, {"npss", report.npss}};
    if (!report.label.empty()) {
        j["label"] = report.label;
    }
    return j.dump(2);
}

std::string report_to_json(const ValidationReport& report) {
    nlohmann::json j{{"errors", report.errors},
                     {"warnings", report.warnings},
                     {"sampling_excluded", report.sampling_excluded},
                     {"ok", report.ok()}};
    return j.dump(2);
}

}  // namespace pointmotion
