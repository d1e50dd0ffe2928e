#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "error.hpp"
#include "mocap.hpp"
#include "test_support.hpp"

using namespace gm;
using gmtest::make_arm_skeleton;
using gmtest::make_clip;

namespace {

const char* kMinimalBvh =
    "HIERARCHY\n"
    "ROOT Root\n"
    "{\n"
    "\tOFFSET 0 0 0\n"
    "\tCHANNELS 3 Zrotation Xrotation Yrotation\n"
    "\tEnd Site\n"
    "\t{\n"
    "\t\tOFFSET 0 1 0\n"
    "\t}\n"
    "}\n"
    "MOTION\n"
    "Frames: 2\n"
    "Frame Time: 0.04\n"
    "0 0 0\n"
    "0 0 0\n";

// Independent FK oracle: a chain of 4x4 homogeneous matrices, one factor per
// channel, with no quaternions anywhere.
Eigen::Matrix4d rotation4(int axis, double degrees) {
    const double a = degrees * M_PI / 180.0;
    const double c = std::cos(a);
    const double s = std::sin(a);
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    m(u, u) = c;
    m(u, v) = -s;
    m(v, u) = s;
    m(v, v) = c;
    return m;
}

Eigen::Matrix4d translation4(const Eigen::Vector3d& t) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.block<3, 1>(0, 3) = t;
    return m;
}

std::vector<Eigen::Vector3d> matrix_chain_positions(const Skeleton& skeleton,
                                                    std::span<const double> frame) {
    const auto offsets = skeleton.channel_offsets();
    std::vector<Eigen::Matrix4d> world(skeleton.joints.size());
    std::vector<Eigen::Vector3d> positions(skeleton.joints.size());
    for (std::size_t j = 0; j < skeleton.joints.size(); ++j) {
        const Joint& joint = skeleton.joints[j];
        Eigen::Matrix4d local = translation4(joint.offset);
        for (std::size_t c = 0; c < joint.channels.size(); ++c) {
            const double value = frame[offsets[j] + c];
            switch (joint.channels[c]) {
            case Channel::Xposition: local = local * translation4({value, 0, 0}); break;
            case Channel::Yposition: local = local * translation4({0, value, 0}); break;
            case Channel::Zposition: local = local * translation4({0, 0, value}); break;
            case Channel::Xrotation: local = local * rotation4(0, value); break;
            case Channel::Yrotation: local = local * rotation4(1, value); break;
            case Channel::Zrotation: local = local * rotation4(2, value); break;
            }
        }
        world[j] = joint.parent < 0 ? local : world[joint.parent] * local;
        positions[j] = world[j].block<3, 1>(0, 3);
    }
    return positions;
}

} // namespace

TEST_CASE("parse minimal document") {
    const BvhDocument doc = parse_bvh(kMinimalBvh);
    CHECK(doc.skeleton.joints.size() == 2); // root + end site
    CHECK(doc.skeleton.joints[0].channels.size() == 3);
    CHECK(doc.skeleton.joints[1].end_site);
    CHECK(doc.skeleton.channel_count() == 3);
    CHECK(doc.clip.frame_count() == 2);
    CHECK(doc.clip.channel_count == 3);
    CHECK(doc.clip.frame_time == doctest::Approx(0.04));
    CHECK(doc.warnings.empty());
}

TEST_CASE("parse accepts CRLF") {
    std::string crlf = kMinimalBvh;
    std::string converted;
    for (char c : crlf) {
        if (c == '\n') converted += "\r\n";
        else converted += c;
    }
    const BvhDocument doc = parse_bvh(converted);
    CHECK(doc.clip.frame_count() == 2);
}

TEST_CASE("round trip preserves hierarchy and values") {
    const Skeleton skeleton = make_arm_skeleton();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-170.0, 170.0);
    const MotionClip clip = make_clip(skeleton, 13, 1.0 / 60.0,
                                      [&](std::size_t, std::span<double> frame) {
                                          for (double& v : frame) v = angle(rng);
                                      });

    const std::string text = serialize_bvh(skeleton, clip);
    const BvhDocument reparsed = parse_bvh(text);

    REQUIRE(reparsed.skeleton.joints.size() == skeleton.joints.size());
    for (std::size_t j = 0; j < skeleton.joints.size(); ++j) {
        CHECK(reparsed.skeleton.joints[j].name == skeleton.joints[j].name);
        CHECK(reparsed.skeleton.joints[j].parent == skeleton.joints[j].parent);
        CHECK(reparsed.skeleton.joints[j].channels == skeleton.joints[j].channels);
        CHECK(reparsed.skeleton.joints[j].end_site == skeleton.joints[j].end_site);
        CHECK((reparsed.skeleton.joints[j].offset - skeleton.joints[j].offset).norm() == 0.0);
    }
    REQUIRE(reparsed.clip.values.size() == clip.values.size());
    for (std::size_t i = 0; i < clip.values.size(); ++i)
        CHECK(std::abs(reparsed.clip.values[i] - clip.values[i]) <= 1e-5);

    // Second round trip is exact: the formatter is a fixed point of itself.
    CHECK(serialize_bvh(reparsed.skeleton, reparsed.clip) == text);
}

TEST_CASE("serialize empty motion") {
    const Skeleton skeleton = gmtest::make_minimal_skeleton();
    MotionClip clip;
    clip.frame_time = 0.02;
    clip.channel_count = 3;
    const std::string text = serialize_bvh(skeleton, clip);
    CHECK(text.find("Frames: 0") != std::string::npos);
    const BvhDocument reparsed = parse_bvh(text);
    CHECK(reparsed.clip.frame_count() == 0);
    CHECK(reparsed.clip.frame_time == 0.02);
}

TEST_CASE("serialize rejects channel mismatch") {
    const Skeleton skeleton = gmtest::make_minimal_skeleton();
    MotionClip clip;
    clip.frame_time = 0.02;
    clip.channel_count = 4;
    clip.values.assign(4, 0.0);
    CHECK_THROWS_AS(serialize_bvh(skeleton, clip), Error);
}

TEST_CASE("parser reports errors with line numbers") {
    auto message_of = [](const std::string& text) {
        try {
            parse_bvh(text);
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };

    SUBCASE("malformed header") {
        const std::string msg = message_of("NOTBVH\nROOT x\n");
        CHECK(msg.find("line 1") != std::string::npos);
    }
    SUBCASE("unsupported channel name") {
        const std::string msg = message_of("HIERARCHY\nROOT a\n{\nOFFSET 0 0 0\n"
                                           "CHANNELS 3 Xrotation Wrotation Zrotation\n}\n"
                                           "MOTION\nFrames: 0\nFrame Time: 0.1\n");
        CHECK(msg.find("Wrotation") != std::string::npos);
        CHECK(msg.find("line 5") != std::string::npos);
    }
    SUBCASE("frame value count mismatch") {
        const std::string msg = message_of("HIERARCHY\nROOT a\n{\nOFFSET 0 0 0\n"
                                           "CHANNELS 3 Xrotation Yrotation Zrotation\n}\n"
                                           "MOTION\nFrames: 2\nFrame Time: 0.1\n1 2 3\n4 5\n");
        CHECK(msg.find("expected 3") != std::string::npos);
    }
    SUBCASE("non-finite value") {
        const std::string msg = message_of("HIERARCHY\nROOT a\n{\nOFFSET 0 0 0\n"
                                           "CHANNELS 3 Xrotation Yrotation Zrotation\n}\n"
                                           "MOTION\nFrames: 1\nFrame Time: 0.1\n1 nan 3\n");
        CHECK(msg.find("non-finite") != std::string::npos);
        CHECK(msg.find("line 10") != std::string::npos);
    }
    SUBCASE("trailing values") {
        const std::string msg = message_of("HIERARCHY\nROOT a\n{\nOFFSET 0 0 0\n"
                                           "CHANNELS 3 Xrotation Yrotation Zrotation\n}\n"
                                           "MOTION\nFrames: 1\nFrame Time: 0.1\n1 2 3 4\n");
        CHECK(msg.find("trailing") != std::string::npos);
    }
}

TEST_CASE("parser warns on non-root position channels") {
    const std::string text =
        "HIERARCHY\nROOT a\n{\nOFFSET 0 0 0\nCHANNELS 3 Xrotation Yrotation Zrotation\n"
        "JOINT b\n{\nOFFSET 0 1 0\nCHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation\n}\n}\n"
        "MOTION\nFrames: 0\nFrame Time: 0.1\n";
    const BvhDocument doc = parse_bvh(text);
    REQUIRE(doc.warnings.size() == 1);
    CHECK(doc.warnings[0].find("position channels") != std::string::npos);
}

TEST_CASE("FK identity pose accumulates offsets") {
    const Skeleton skeleton = make_arm_skeleton();
    std::vector<double> frame(skeleton.channel_count(), 0.0);
    const Pose pose = forward_kinematics(skeleton, frame);

    const int rwrist = skeleton.find_joint("RWrist");
    REQUIRE(rwrist >= 0);
    CHECK((pose.positions[rwrist] - Eigen::Vector3d(-2.0, 5.0, 0.0)).norm() < 1e-12);

    // Every joint is the running sum of its ancestors' offsets.
    for (std::size_t j = 0; j < skeleton.joints.size(); ++j) {
        Eigen::Vector3d expected = Eigen::Vector3d::Zero();
        for (int k = static_cast<int>(j); k >= 0; k = skeleton.joints[k].parent)
            expected += skeleton.joints[k].offset;
        CHECK((pose.positions[j] - expected).norm() < 1e-12);
    }
}

TEST_CASE("FK analytic rotation") {
    Skeleton skeleton;
    skeleton.joints.push_back(gmtest::make_joint("root", -1, {0, 0, 0}, gmtest::kRotChannels));
    skeleton.joints.push_back(gmtest::make_joint("tip", 0, {1, 0, 0}, {}, true));
    std::vector<double> frame = {90.0, 0.0, 0.0}; // Zrotation first
    const Pose pose = forward_kinematics(skeleton, frame);
    CHECK((pose.positions[1] - Eigen::Vector3d(0.0, 1.0, 0.0)).norm() < 1e-9);
}

TEST_CASE("FK matches the homogeneous-matrix oracle") {
    Skeleton chain;
    chain.joints.push_back(gmtest::make_joint("j0", -1, {0.0, 1.0, 0.0}, gmtest::kRootChannels));
    chain.joints.push_back(gmtest::make_joint(
        "j1", 0, {0.5, 0.5, 0.0},
        {Channel::Xrotation, Channel::Yrotation, Channel::Zrotation}));
    chain.joints.push_back(gmtest::make_joint(
        "j2", 1, {0.0, 0.7, 0.3},
        {Channel::Yrotation, Channel::Zrotation, Channel::Xrotation}));
    chain.joints.push_back(gmtest::make_joint("j3", 2, {0.2, 0.4, 0.1}, gmtest::kRotChannels));
    chain.joints.push_back(gmtest::make_joint("j4", 3, {0.0, 0.3, 0.0}, gmtest::kRotChannels));

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> angle(-180.0, 180.0);
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    const auto offsets = chain.channel_offsets();

    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> frame(chain.channel_count());
        for (std::size_t j = 0; j < chain.joints.size(); ++j) {
            for (std::size_t c = 0; c < chain.joints[j].channels.size(); ++c) {
                const bool rot = is_rotation_channel(chain.joints[j].channels[c]);
                frame[offsets[j] + c] = rot ? angle(rng) : shift(rng);
            }
        }
        const Pose pose = forward_kinematics(chain, frame);
        const auto expected = matrix_chain_positions(chain, frame);
        for (std::size_t j = 0; j < chain.joints.size(); ++j)
            worst = std::max(worst, (pose.positions[j] - expected[j]).norm());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("FK is deterministic") {
    const Skeleton skeleton = make_arm_skeleton();
    std::vector<double> frame(skeleton.channel_count());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-90.0, 90.0);
    for (double& v : frame) v = angle(rng);

    const Pose a = forward_kinematics(skeleton, frame);
    const Pose b = forward_kinematics(skeleton, frame);
    for (std::size_t j = 0; j < skeleton.joints.size(); ++j) {
        CHECK(std::memcmp(a.positions[j].data(), b.positions[j].data(), 3 * sizeof(double)) == 0);
        CHECK(std::memcmp(a.orientations[j].coeffs().data(), b.orientations[j].coeffs().data(),
                          4 * sizeof(double)) == 0);
    }
}

TEST_CASE("FK offset scaling at identity rotations") {
    Skeleton skeleton = make_arm_skeleton();
    std::vector<double> frame(skeleton.channel_count(), 0.0);
    const Pose base = forward_kinematics(skeleton, frame);

    const double scale = 3.25;
    Skeleton scaled = skeleton;
    for (Joint& j : scaled.joints) j.offset *= scale;
    const Pose big = forward_kinematics(scaled, frame);
    for (std::size_t j = 0; j < skeleton.joints.size(); ++j)
        CHECK((big.positions[j] - scale * base.positions[j]).norm() < 1e-9);
}

TEST_CASE("FK rejects bad input") {
    const Skeleton skeleton = gmtest::make_minimal_skeleton();
    std::vector<double> wrong(skeleton.channel_count() + 1, 0.0);
    CHECK_THROWS_AS(forward_kinematics(skeleton, wrong), Error);

    std::vector<double> nonfinite(skeleton.channel_count(), 0.0);
    nonfinite[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(forward_kinematics(skeleton, nonfinite), Error);
}

TEST_CASE("orientation quaternions stay unit") {
    const Skeleton skeleton = make_arm_skeleton();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-180.0, 180.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> frame(skeleton.channel_count());
        for (double& v : frame) v = angle(rng);
        const Pose pose = forward_kinematics(skeleton, frame);
        for (const auto& q : pose.orientations) CHECK(std::abs(q.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("euler extraction round-trips every channel order") {
    const std::array<std::array<Channel, 3>, 6> orders = {{
        {Channel::Xrotation, Channel::Yrotation, Channel::Zrotation},
        {Channel::Xrotation, Channel::Zrotation, Channel::Yrotation},
        {Channel::Yrotation, Channel::Xrotation, Channel::Zrotation},
        {Channel::Yrotation, Channel::Zrotation, Channel::Xrotation},
        {Channel::Zrotation, Channel::Xrotation, Channel::Yrotation},
        {Channel::Zrotation, Channel::Yrotation, Channel::Xrotation},
    }};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (const auto& order : orders) {
        Joint joint;
        joint.name = "j";
        joint.channels.assign(order.begin(), order.end());
        for (int trial = 0; trial < 200; ++trial) {
            Eigen::Quaterniond q(unit(rng), unit(rng), unit(rng), unit(rng));
            if (q.norm() < 1e-3) continue;
            q.normalize();
            double values[3];
            set_joint_rotation(joint, q, values);
            const Eigen::Quaterniond back = joint_rotation(joint, values);
            CHECK(std::abs(std::abs(q.dot(back)) - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("slice semantics") {
    const Skeleton skeleton = gmtest::make_minimal_skeleton();
    // Mark each frame with its own index so slices are traceable.
    const MotionClip clip = make_clip(skeleton, 120, 1.0 / 60.0,
                                      [](std::size_t f, std::span<double> frame) {
                                          frame[0] = static_cast<double>(f);
                                      });

    SUBCASE("full duration keeps every frame") {
        const MotionClip whole = slice_clip(clip, 0.0, clip.duration());
        CHECK(whole.frame_count() == 120);
    }
    SUBCASE("one frame_time yields one frame") {
        const MotionClip one = slice_clip(clip, 0.5, 0.5 + clip.frame_time);
        CHECK(one.frame_count() == 1);
        CHECK(one.frame(0)[0] == 30.0);
    }
    SUBCASE("half-second window at 60 fps") {
        const MotionClip window = slice_clip(clip, 0.5, 1.0);
        CHECK(window.frame_count() == 30);
        CHECK(window.frame(0)[0] == 30.0);
        CHECK(window.frame(29)[0] == 59.0);
    }
    SUBCASE("out of range throws") {
        CHECK_THROWS_AS(slice_clip(clip, -0.1, 1.0), Error);
        CHECK_THROWS_AS(slice_clip(clip, 1.0, 0.5), Error);
        CHECK_THROWS_AS(slice_clip(clip, 0.0, 3.0), Error);
    }
}
