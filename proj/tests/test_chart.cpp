#include <gtest/gtest.h>

#include "friable/chart.hpp"

using namespace friable;
using namespace friable::chart;

namespace {

const char* kCsv = "n,a,b\r\n1,0.5,10\n2,0.25,100\n\n3,nan,1000\n";

} // namespace

TEST(Csv, Parse) {
    const auto t = parse_csv(kCsv);
    EXPECT_EQ(t.header, (std::vector<std::string>{"n", "a", "b"}));
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[2][1], "nan");
    EXPECT_EQ(t.column("b"), 2u);
    EXPECT_EQ(split_line("x,,y"), (std::vector<std::string>{"x", "", "y"}));
    EXPECT_EQ(split_line("a,\"b, \"\"c\"\"\",d"), (std::vector<std::string>{"a", "b, \"c\"", "d"}));
    EXPECT_THROW(split_line("a,\"b"), Error);
    EXPECT_DOUBLE_EQ(parse_number("1e-3"), 1e-3);
    EXPECT_TRUE(std::isnan(parse_number("abc")));
    EXPECT_TRUE(std::isnan(parse_number("1.5x")));
}

TEST(Csv, Errors) {
    auto kind = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InternalAssertion;
    };
    EXPECT_EQ(kind([] { parse_csv(""); }), ErrorKind::MissingData);
    EXPECT_EQ(kind([] { parse_csv("a,b\n"); }), ErrorKind::MissingData);
    EXPECT_EQ(kind([] { parse_csv("a,b\n1\n"); }), ErrorKind::InvalidArgument);
    const auto t = parse_csv(kCsv);
    EXPECT_EQ(kind([&] { t.column("zzz"); }), ErrorKind::MissingColumn);
    EXPECT_EQ(kind([&] { render_svg(t, "n", {"missing"}); }), ErrorKind::MissingColumn);
    EXPECT_EQ(kind([&] { render_svg(parse_csv("a,b\nx,y\n"), "a", {"b"}); }), ErrorKind::MissingData);
}

TEST(Svg, DeterministicAndWellFormed) {
    const auto t = parse_csv(kCsv);
    const auto one = render_svg(t, "n", {"a", "b"}, true);
    const auto two = render_svg(parse_csv(kCsv), "n", {"a", "b"}, true);
    EXPECT_EQ(one, two);
    EXPECT_EQ(one.rfind("<svg", 0), 0u);
    EXPECT_NE(one.find("</svg>"), std::string::npos);
    // two series, the nan cell is skipped
    std::size_t polylines = 0;
    for (auto pos = one.find("<polyline"); pos != std::string::npos; pos = one.find("<polyline", pos + 1)) ++polylines;
    EXPECT_EQ(polylines, 2u);
    EXPECT_NE(one.find("b (log10)"), std::string::npos);
    EXPECT_NE(render_svg(t, "n", {"a"}), one);
}

TEST(Svg, EscapesLabels) {
    const auto t = parse_csv("x,<y&z>\n1,2\n2,3\n");
    const auto svg = render_svg(t, "x", {"<y&z>"});
    EXPECT_NE(svg.find("&lt;y&amp;z&gt;"), std::string::npos);
}
