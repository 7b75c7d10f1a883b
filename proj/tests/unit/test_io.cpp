#include "faskit/dgp.hpp"
#include "faskit/io.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace faskit;

namespace {

CsvColumns cols(std::vector<std::string> instruments = {"z1", "z2"}, std::vector<std::string> controls = {}) {
    CsvColumns c;
    c.outcome = "y";
    c.treatment = "x";
    c.instruments = std::move(instruments);
    c.controls = std::move(controls);
    return c;
}

CsvLoadResult parse(const std::string& text, const CsvColumns& c = cols()) {
    std::istringstream in(text);
    return read_csv(in, c, "mem.csv");
}

std::string error_text(const std::string& text, const CsvColumns& c = cols()) {
    try {
        (void)parse(text, c);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

const char* kFive =
    "id,y,x,z1,z2,w\n"
    "a,1.5,2,0.1,-1,3\n"
    "b,2.5,1,0.2,1e-1,4\n"
    "c,-0.5,0,+0.3,2,5\n"
    "d,3,4,0.4,0,6\n"
    "e,1,1,0.5,-2.5,7\n";

}  // namespace

TEST_CASE("clean five-row file") {
    const auto r = parse(kFive, cols({"z1", "z2"}, {"w"}));
    CHECK(r.dropped_rows == 0);
    CHECK(r.dataset.n() == 5);
    CHECK(r.dataset.kz() == 2);
    CHECK(r.dataset.kw() == 1);
    CHECK(r.dataset.y(0) == 1.5);
    CHECK(r.dataset.instruments(1, 1) == 0.1);
    CHECK(r.dataset.instruments(2, 0) == 0.3);
    CHECK(r.dataset.controls(4, 0) == 7.0);
    CHECK(r.dataset.instrument_names == std::vector<std::string>{"z1", "z2"});
    CHECK(r.dataset.provenance == "mem.csv");
    // user order, not file order
    const auto swapped = parse(kFive, cols({"z2", "z1"}));
    CHECK(swapped.dataset.instruments(0, 0) == -1.0);
}

TEST_CASE("blank and NA cells drop their rows") {
    const auto r = parse("y,x,z1,z2,note\n1,2,3,4,ok\n1,,3,4,ok\n5,6,7,8,\n2,3,NA,1,x\n");
    CHECK(r.dropped_rows == 2);
    CHECK(r.dataset.n() == 2);
    CHECK(r.dataset.y(1) == 5.0);
    const auto one = parse("y,x,z1,z2\n1,2,3,4\n1,2,,4\n0,1,1,0\n");
    CHECK(one.dropped_rows == 1);
}

TEST_CASE("role clashes name the column") {
    auto c = cols({"x", "z2"});
    const auto msg = error_text(kFive, c);
    CHECK(msg.find("'x'") != std::string::npos);
    CHECK(msg.find("treatment") != std::string::npos);
    CHECK(msg.find("instrument") != std::string::npos);
    CHECK_THROWS_KIND(parse(kFive, c), ErrorKind::MissingColumn);
    CHECK_THROWS_KIND(parse(kFive, cols({"z1", "z1"})), ErrorKind::MissingColumn);
    CHECK_THROWS_KIND(parse(kFive, cols({"z1"}, {"z1"})), ErrorKind::MissingColumn);
    CHECK_THROWS_KIND(parse(kFive, cols({})), ErrorKind::MissingColumn);
}

TEST_CASE("missing and duplicated header names") {
    CHECK_THROWS_KIND(parse(kFive, cols({"z1", "z9"})), ErrorKind::MissingColumn);
    CHECK(error_text(kFive, cols({"z9"})).find("z9") != std::string::npos);
    CHECK_THROWS_KIND(parse("y,x,z1,z1\n1,2,3,4\n", cols({"z1"})), ErrorKind::MissingColumn);
}

TEST_CASE("parse errors identify row and column") {
    const std::string text = "y,x,z1,z2\n1,2,3,4\n1,2,abc,4\n";
    CHECK_THROWS_KIND(parse(text), ErrorKind::ParseError);
    const auto msg = error_text(text);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("'z1'") != std::string::npos);
    CHECK(msg.find("abc") != std::string::npos);
    CHECK_THROWS_KIND(parse("y,x,z1,z2\n1,2,3,inf\n"), ErrorKind::ParseError);
    CHECK_THROWS_KIND(parse("y,x,z1,z2\n1,2,3,1.5x\n"), ErrorKind::ParseError);
    CHECK_THROWS_KIND(parse("y,x,z1,z2\n1,2,3\n"), ErrorKind::ParseError);
    CHECK(error_text("y,x,z1,z2\n1,2,3\n").find("line 2") != std::string::npos);
    CHECK_THROWS_KIND(parse(""), ErrorKind::ParseError);
}

TEST_CASE("nothing left after filtering") {
    CHECK_THROWS_KIND(parse("y,x,z1,z2\n"), ErrorKind::EmptyAfterFiltering);
    CHECK_THROWS_KIND(parse("y,x,z1,z2\n,1,1,1\nNA,2,2,2\n"), ErrorKind::EmptyAfterFiltering);
}

TEST_CASE("missing file") {
    CHECK_THROWS_KIND(load_csv("/nonexistent/dir/data.csv", cols()), ErrorKind::FileNotFound);
    CHECK_THROWS_KIND(load_model("/nonexistent/model.txt"), ErrorKind::FileNotFound);
}

TEST_CASE("quoted headers, CRLF and blank lines") {
    const auto r = parse("\"y\",\"x\",\"z1\",\"z2\"\r\n1,2,3,4\r\n\r\n5,6,7,8\r\n");
    CHECK(r.dataset.n() == 2);
    CHECK(r.dataset.instruments(1, 1) == 8.0);
}

TEST_CASE("simulated data survives a CSV round trip") {
    SimulationConfig cfg;
    cfg.model = make_model(0.3, Eigen::Vector3d(1, 0.5, -0.2), Eigen::Vector3d(0.1, 0, 0), Eigen::Vector3d(0, 0, 0.2),
                           Eigen::Matrix3d::Identity());
    cfg.n = 50;
    const Dataset d = simulate(cfg);
    std::stringstream buf;
    write_csv(buf, d);
    const auto back = read_csv(buf, cols({"Z1", "Z2", "Z3"}));
    CHECK(back.dataset.y == d.y);
    CHECK(back.dataset.x == d.x);
    CHECK(back.dataset.instruments == d.instruments);

    const auto path = std::filesystem::temp_directory_path() / "faskit_io_roundtrip.csv";
    {
        std::ofstream f(path);
        write_csv(f, d);
    }
    CHECK(load_csv(path.string(), cols({"Z1", "Z2", "Z3"})).dataset.x == d.x);
    std::filesystem::remove(path);
}

TEST_CASE("model file") {
    const std::string text =
        "# example\n"
        "beta = 1\n"
        "pi = 1, 1, 1\n"
        "gamma = -1, 0, 2\n"
        "sigma_z = 1, 0.2, 0\n"
        "sigma_z = 0.2, 1, 0\n"
        "sigma_z = 0, 0, 1\n"
        "endogeneity = 0.25\n";
    std::istringstream in(text);
    const auto f = read_model(in);
    CHECK(f.model.beta == 1.0);
    CHECK(f.model.gamma(2) == 2.0);
    CHECK(f.model.alpha.isZero());
    CHECK(f.model.sigma_z(1, 0) == 0.2);
    CHECK(f.model.var_u == 1.0);
    REQUIRE(f.endogeneity);
    CHECK(*f.endogeneity == 0.25);

    std::stringstream out;
    write_model(out, f);
    const auto g = read_model(out);
    CHECK(g.model.pi == f.model.pi);
    CHECK(g.model.gamma == f.model.gamma);
    CHECK(g.model.sigma_z == f.model.sigma_z);
    CHECK(g.endogeneity == f.endogeneity);

    std::istringstream minimal("beta = 2\npi = 0.5\n");
    const auto h = read_model(minimal);
    CHECK(h.model.sigma_z.isIdentity());
    CHECK_FALSE(h.endogeneity);
}

TEST_CASE("bad model files") {
    auto fails = [](const std::string& text, ErrorKind kind) {
        std::istringstream in(text);
        CHECK_THROWS_KIND(read_model(in), kind);
    };
    fails("pi = 1\n", ErrorKind::ParseError);
    fails("beta = 1\n", ErrorKind::ParseError);
    fails("beta = 1\npi = 1\nbeta = 2\n", ErrorKind::ParseError);
    fails("beta = 1\npi = 1\ncolour = 2\n", ErrorKind::ParseError);
    fails("beta = 1\npi = 1, x\n", ErrorKind::ParseError);
    fails("beta = 1\npi = 1\njunk\n", ErrorKind::ParseError);
    fails("beta = 1, 2\npi = 1\n", ErrorKind::ParseError);
    fails("beta = 1\npi = 1, 1\nsigma_z = 1, 0\n", ErrorKind::ParseError);
    fails("beta = 1\npi = 1, 1\ngamma = 1\n", ErrorKind::InvalidModel);
    fails("beta = 1\npi = 1, 1\nsigma_z = 1, 1\nsigma_z = 1, 1\n", ErrorKind::SingularSigma);
    fails("beta = 1\npi = 1\nvar_u = 0\n", ErrorKind::InvalidModel);
}
