#include <gtest/gtest.h>

#include "genbench/run_key.hpp"
#include "genbench/util/error.hpp"

namespace genbench {
namespace {

TEST(Steps, ParseAndOrder) {
    EXPECT_EQ(Steps::parse("25").count(), 25);
    EXPECT_TRUE(Steps::parse("dynamic").is_dynamic());
    EXPECT_THROW(Steps::parse("0"), InvalidInput);
    EXPECT_THROW(Steps::parse("x"), InvalidInput);
    EXPECT_THROW(Steps::dynamic().count(), InvalidInput);
    EXPECT_LT(Steps(5), Steps(25));
    EXPECT_LT(Steps(1000), Steps::dynamic());
    EXPECT_EQ(Steps::from_json(Steps::dynamic().to_json()), Steps::dynamic());
}

TEST(RunKey, CanonicalStringRoundTrips) {
    const RunKey k{"MeanFlow (B/4)", 7, Steps(25), "imagenet", 42};
    EXPECT_EQ(k.to_string(), "MeanFlow (B/4)|cfg=7|steps=25|imagenet|seed=42");
    EXPECT_EQ(RunKey::parse(k.to_string()), k);
    EXPECT_EQ(RunKey::from_json(k.to_json()), k);
    const RunKey d{"SiT", 1.42, Steps::dynamic(), "imagenetv2", 7};
    EXPECT_EQ(RunKey::parse(d.to_string()), d);
    EXPECT_EQ(format_cfg(1.42), "1.42");
    EXPECT_EQ(format_cfg(3.5), "3.5");
}

TEST(RunKey, DirNameIsFilesystemSafe) {
    const RunKey k{"Scale RAE*/x", 1.42, Steps(25), "imagenet", 42};
    const auto dir = k.dir_name();
    EXPECT_EQ(dir.find('/'), std::string::npos);
    EXPECT_EQ(dir.find('*'), std::string::npos);
    EXPECT_EQ(dir.find(' '), std::string::npos);
    const RunKey other{"Scale RAE* x", 1.42, Steps(25), "imagenet", 42};
    EXPECT_NE(other.dir_name(), dir);
}

TEST(RunKey, RejectsMalformedText) {
    EXPECT_THROW(RunKey::parse("model|cfg=7|steps=25"), InvalidInput);
    EXPECT_THROW(RunKey::parse("m|cfg=x|steps=25|d|seed=1"), InvalidInput);
}

}  // namespace
}  // namespace genbench
