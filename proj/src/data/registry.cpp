#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "xsr/data/dataset.hpp"
#include "xsr/expr/parse.hpp"

namespace xsr::data {

namespace {

// Bundled physics-style equations. Users can extend the registry with their
// own manifest files of the same shape.
constexpr const char* kBundledManifest = R"(# name | expression | var:lo:hi,... | train-sampler | test-sampler
feynman-I.6.20a   | exp(-(theta^2)/2)/sqrt(2*pi)                  | theta:1:3                          | uniform(1000) | lhs(30)
feynman-I.6.20    | exp(-((theta/sigma)^2)/2)/(sqrt(2*pi)*sigma)  | sigma:1:3,theta:1:3                | uniform(1000) | lhs(30)
feynman-I.8.14    | sqrt((x2-x1)^2+(y2-y1)^2)                     | x1:0:1,x2:1:2,y1:0:1,y2:1:2        | uniform(1000) | lhs(30)
feynman-I.10.7    | m_0/sqrt(1-v^2/c^2)                           | m_0:1:5,v:1:2,c:3:10               | uniform(1000) | lhs(30)
feynman-I.12.1    | mu*Nn                                         | mu:1:5,Nn:1:5                      | uniform(1000) | lhs(30)
feynman-I.12.2    | q1*q2/(4*pi*epsilon*r^2)                      | q1:1:5,q2:1:5,epsilon:1:5,r:1:5    | uniform(1000) | lhs(30)
feynman-I.12.5    | q2*Ef                                         | q2:1:5,Ef:1:5                      | uniform(1000) | lhs(30)
feynman-I.14.3    | m*g*z                                         | m:1:5,g:1:5,z:1:5                  | uniform(1000) | lhs(30)
feynman-I.14.4    | k_spring*x^2/2                                | k_spring:1:5,x:1:5                 | uniform(1000) | lhs(30)
feynman-I.25.13   | q/C                                           | q:1:5,C:1:5                        | uniform(1000) | lhs(30)
feynman-I.26.2    | arcsin(n*sin(theta2))                         | n:0:1,theta2:1:1.25                | uniform(1000) | lhs(30)
feynman-I.29.4    | omega/c                                       | omega:1:10,c:1:10                  | uniform(1000) | lhs(30)
feynman-I.39.1    | 3/2*pr*V                                      | pr:1:5,V:1:5                       | uniform(1000) | lhs(30)
feynman-II.3.24   | Pwr/(4*pi*r^2)                                | Pwr:1:5,r:1:5                      | uniform(1000) | lhs(30)
oscillator-displacement | 2.5*cos(phase)                          | phase:-5:5                         | uniform(1000) | lhs(30)
kinematics-velocity     | u+a_c*t                                 | u:1:5,a_c:1:5,t:1:5                | uniform(1000) | lhs(30)
)";

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(trim(s.substr(start)));
            return parts;
        }
        parts.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
}

double parse_number(const std::string& token, std::string_view context, std::size_t line_no) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || token.empty()) {
        throw ParseError("manifest " + std::string(context) + ": bad number '" + token + "'", line_no);
    }
    return value;
}

SamplerSpec parse_sampler(const std::string& token, bool for_train, std::string_view context,
                          std::size_t line_no) {
    const std::size_t open = token.find('(');
    if (open == std::string::npos || token.back() != ')') {
        throw ParseError("manifest " + std::string(context) + ": bad sampler '" + token + "'", line_no);
    }
    const std::string kind = trim(token.substr(0, open));
    const std::vector<std::string> args = split(token.substr(open + 1, token.size() - open - 2), ',');

    if (kind == "uniform") {
        if (args.size() == 1) {
            return SamplerSpec::uniform(static_cast<int>(parse_number(args[0], context, line_no)));
        }
        if (args.size() == 3) {
            return SamplerSpec::uniform(static_cast<int>(parse_number(args[0], context, line_no)),
                                        parse_number(args[1], context, line_no),
                                        parse_number(args[2], context, line_no));
        }
    } else if (kind == "grid" && args.size() == 3) {
        return SamplerSpec::grid(parse_number(args[0], context, line_no),
                                 parse_number(args[1], context, line_no),
                                 parse_number(args[2], context, line_no));
    } else if (kind == "lhs" && args.size() == 1) {
        if (for_train) {
            throw ParseError("manifest " + std::string(context) + ": lhs is test-only", line_no);
        }
        return SamplerSpec::latin_hypercube(static_cast<int>(parse_number(args[0], context, line_no)));
    }
    throw ParseError("manifest " + std::string(context) + ": bad sampler '" + token + "'", line_no);
}

GroundTruth parse_record(const std::string& line, std::string_view source, std::size_t line_no) {
    const std::vector<std::string> fields = split(line, '|');
    if (fields.size() != 5) {
        throw ParseError("manifest " + std::string(source) + ": expected 5 '|'-separated fields",
                         line_no);
    }

    FeatureSpace space;
    for (const std::string& var : split(fields[2], ',')) {
        const std::vector<std::string> parts = split(var, ':');
        if (parts.size() != 3 || parts[0].empty()) {
            throw ParseError("manifest " + std::string(source) + ": bad variable spec '" + var + "'",
                             line_no);
        }
        space.names.push_back(parts[0]);
        space.lower.conservativeResize(space.lower.size() + 1);
        space.upper.conservativeResize(space.upper.size() + 1);
        space.lower[space.lower.size() - 1] = parse_number(parts[1], source, line_no);
        space.upper[space.upper.size() - 1] = parse_number(parts[2], source, line_no);
    }
    space.validate();

    expr::ExprTree tree;
    try {
        tree = expr::parse(fields[1], space.names);
    } catch (const ParseError& e) {
        throw ParseError("manifest " + std::string(source) + " line " + std::to_string(line_no) +
                             ": " + e.what(),
                         line_no);
    }

    return {fields[0], std::move(tree), std::move(space),
            parse_sampler(fields[3], true, source, line_no),
            parse_sampler(fields[4], false, source, line_no)};
}

GroundTruth make_builtin(const std::string& name, const std::string& formula,
                         std::vector<std::string> names, double lo, double hi,
                         SamplerSpec train, SamplerSpec test) {
    FeatureSpace space;
    space.names = std::move(names);
    space.lower.setConstant(static_cast<Eigen::Index>(space.names.size()), lo);
    space.upper.setConstant(static_cast<Eigen::Index>(space.names.size()), hi);
    expr::ExprTree tree = expr::parse(formula, space.names);
    return {name, std::move(tree), std::move(space), train, test};
}

std::vector<GroundTruth> build_registry() {
    std::vector<GroundTruth> list;
    list.push_back(make_builtin("korns-11", "6.87 + 11*cos(7.23*x^3)", {"x", "y", "z", "v", "w"},
                                -50.0, 10.0, SamplerSpec::uniform(1000), SamplerSpec::uniform(100)));
    list.push_back(make_builtin("korns-12", "2 - 2.1*cos(9.8*x)*sin(1.3*w)", {"x", "y", "z", "v", "w"},
                                -50.0, 10.0, SamplerSpec::uniform(1000), SamplerSpec::uniform(100)));
    list.push_back(make_builtin(
        "vladislavleva-4",
        "10/(5 + (x1-3)^2 + (x2-3)^2 + (x3-3)^2 + (x4-3)^2 + (x5-3)^2)",
        {"x1", "x2", "x3", "x4", "x5"}, 0.05, 6.0, SamplerSpec::uniform(1000),
        SamplerSpec::uniform(100, -0.5, 10.0)));
    list.push_back(make_builtin("pagie-1", "1/(1 + x^(-4)) + 1/(1 + y^(-4))", {"x", "y"}, -5.0, 5.0,
                                SamplerSpec::grid(-5.0, 5.0, 0.01), SamplerSpec::grid(-5.0, 5.0, 0.1)));

    for (auto& gt : parse_manifest(kBundledManifest, "bundled")) {
        list.push_back(std::move(gt));
    }
    return list;
}

}  // namespace

std::vector<GroundTruth> parse_manifest(std::string_view text, std::string_view source_name) {
    std::vector<GroundTruth> list;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string record = trim(line);
        if (record.empty() || record[0] == '#') continue;
        list.push_back(parse_record(record, source_name, line_no));
    }
    return list;
}

std::vector<GroundTruth> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_manifest(buffer.str(), path.string());
}

const std::vector<GroundTruth>& registry() {
    static const std::vector<GroundTruth> list = build_registry();
    return list;
}

}  // namespace xsr::data
