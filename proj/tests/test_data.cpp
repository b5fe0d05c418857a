#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <functional>
#include <fstream>
#include <numbers>

#include "locmac/data.hpp"
#include "locmac/error.hpp"

using namespace locmac;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir()
      : path_(fs::temp_directory_path() /
              (std::string("locmac_data_") + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& contents = "") const {
    const auto p = (path_ / name).string();
    if (!contents.empty()) std::ofstream(p) << contents;
    return p;
  }

 private:
  fs::path path_;
};

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Sinc, Conventions) {
  EXPECT_EQ(sinc(0.0), 1.0);
  EXPECT_EQ(sinc(0.0, SincConvention::Unnormalized), 1.0);
  EXPECT_NEAR(sinc(1.0), 0.0, 1e-16);
  EXPECT_NEAR(sinc(0.5), 2.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(sinc(std::numbers::pi, SincConvention::Unnormalized), 0.0, 1e-16);
  EXPECT_NEAR(sinc(1e-9), 1.0, 1e-15);
}

TEST(GenerateSinc, ShapeRangeDeterminism) {
  SincSpec spec;
  const auto a = generate_sinc(spec, 3);
  const auto b = generate_sinc(spec, 3);
  EXPECT_EQ(a.inputs, b.inputs);
  EXPECT_EQ(a.targets, b.targets);
  EXPECT_NE(a.targets, generate_sinc(spec, 4).targets);
  EXPECT_EQ(a.size(), 50);
  EXPECT_EQ(a.dim(), 1);
  EXPECT_GE(a.inputs.minCoeff(), -1.5);
  EXPECT_LE(a.inputs.maxCoeff(), 1.5);
  const VectorXd resid = a.targets - a.inputs.col(0).unaryExpr([](double x) { return sinc(5.0 * x); });
  EXPECT_LT(resid.cwiseAbs().maxCoeff(), 0.5);
  EXPECT_GT(resid.cwiseAbs().maxCoeff(), 0.0);

  SincSpec clean;
  clean.noise_variance = 0.0;
  clean.n_points = 5;
  clean.low = 0.0;
  clean.high = 1e-300;
  const auto c = generate_sinc(clean, 1);
  for (Index i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(c.targets[i], 1.0);
  clean.high = -1.0;
  EXPECT_THROW(generate_sinc(clean, 1), InputError);
}

TEST(GenerateSurface, NamesAndRanges) {
  for (const std::string name : {"ridges", "smooth"}) {
    const auto d = generate_surface(name, 100, 0.0, 9);
    EXPECT_EQ(d.dim(), 2);
    EXPECT_LE(d.inputs.cwiseAbs().maxCoeff(), 1.0);
    for (Index i = 0; i < 100; ++i) {
      EXPECT_EQ(d.targets[i], surface_value(name, d.inputs(i, 0), d.inputs(i, 1)));
    }
  }
  EXPECT_DOUBLE_EQ(surface_value("smooth", 0.0, 0.0), 0.5);
  EXPECT_THROW(generate_surface("bumpy", 10, 0.0, 1), InputError);
  EXPECT_THROW(generate_surface("ridges", 0, 0.0, 1), InputError);
}

TEST(Csv, LoadByNameAndIndex) {
  TempDir dir;
  const auto path = dir.file("small.csv", "a,b,y\n1,2,3\n4,5,6\n");
  const auto byname = load_csv(path, std::string("y"));
  EXPECT_EQ(byname.data.size(), 2);
  EXPECT_EQ(byname.data.dim(), 2);
  EXPECT_EQ(byname.input_columns, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(byname.data.targets, (VectorXd(2) << 3, 6).finished());
  const auto byindex = load_csv(path, Index{0});
  EXPECT_EQ(byindex.target_column, "a");
  EXPECT_EQ(byindex.data.inputs, (MatrixXd(2, 2) << 2, 3, 5, 6).finished());
}

TEST(Csv, StandardizeInputs) {
  TempDir dir;
  const auto path = dir.file("s.csv", "a,b,c,y\n1,10,7,0\n2,20,7,1\n3,60,7,2\n6,10,7,3\n");
  const auto csv = load_csv(path, std::string("y"), true);
  ASSERT_TRUE(csv.standardization.has_value());
  const MatrixXd& X = csv.data.inputs;
  for (Index k = 0; k < 2; ++k) {
    const double mean = X.col(k).mean();
    const double var = (X.col(k).array() - mean).square().mean();
    EXPECT_NEAR(mean, 0.0, 1e-10);
    EXPECT_NEAR(var, 1.0, 1e-10);
  }
  EXPECT_EQ(X.col(2), VectorXd::Zero(4));  // constant column keeps scale 1
  EXPECT_EQ(csv.data.targets, (VectorXd(4) << 0, 1, 2, 3).finished());
}

TEST(Csv, RoundTripIsExact) {
  TempDir dir;
  Dataset d{MatrixXd::Random(7, 3), VectorXd::Random(7)};
  d.inputs(0, 0) = 1.0 / 3.0;
  d.targets[1] = -1e-300;
  const auto path = dir.file("rt.csv");
  write_csv(path, d, {"p", "q", "r"}, "t");
  const auto back = load_csv(path, std::string("t"));
  EXPECT_EQ(back.data.inputs, d.inputs);
  EXPECT_EQ(back.data.targets, d.targets);
  EXPECT_EQ(back.input_columns, (std::vector<std::string>{"p", "q", "r"}));
  write_csv(dir.file("default.csv"), d);
  EXPECT_EQ(load_csv(dir.file("default.csv"), std::string("y")).input_columns[2], "x2");
  EXPECT_THROW(write_csv(dir.file("bad.csv"), d, {"only"}), InputError);
}

TEST(Csv, DescriptiveErrors) {
  TempDir dir;
  EXPECT_NE(error_of([&] { load_csv(dir.file("missing.csv"), std::string("y")); }).find("cannot open"),
            std::string::npos);
  const auto bad = dir.file("bad.csv", "a,y\n1,2\nx,3\n");
  const auto msg = error_of([&] { load_csv(bad, std::string("y")); });
  EXPECT_NE(msg.find("non-numeric"), std::string::npos);
  EXPECT_NE(msg.find("line 3"), std::string::npos);
  EXPECT_NE(error_of([&] { load_csv(bad, std::string("z")); }).find("no column named 'z'"), std::string::npos);
  EXPECT_THROW(load_csv(bad, Index{5}), InputError);
  EXPECT_THROW(load_csv(dir.file("ragged.csv", "a,y\n1,2,3\n"), std::string("y")), InputError);
  EXPECT_THROW(load_csv(dir.file("header.csv", "a,y\n"), std::string("y")), InputError);
  EXPECT_THROW(load_csv(dir.file("one.csv", "y\n1\n"), std::string("y")), InputError);
}

TEST(Csv, ToleratesBomAndCrlf) {
  TempDir dir;
  const auto path = dir.file("bom.csv", "\xEF\xBB\xBF" "a,y\r\n1.5,2\r\n");
  const auto csv = load_csv(path, std::string("a"));
  EXPECT_EQ(csv.target_column, "a");
  EXPECT_EQ(csv.data.targets[0], 1.5);
}

TEST(Split, PartitionsRows) {
  Dataset d{MatrixXd(10, 1), VectorXd(10)};
  for (Index i = 0; i < 10; ++i) {
    d.inputs(i, 0) = i;
    d.targets[i] = 10.0 * i;
  }
  const auto [train, test] = split_dataset(d, 0.7, 5);
  EXPECT_EQ(train.size(), 7);
  EXPECT_EQ(test.size(), 3);
  std::vector<double> all;
  for (Index i = 0; i < 7; ++i) all.push_back(train.inputs(i, 0));
  for (Index i = 0; i < 3; ++i) all.push_back(test.inputs(i, 0));
  std::sort(all.begin(), all.end());
  for (Index i = 0; i < 10; ++i) EXPECT_EQ(all[static_cast<std::size_t>(i)], i);
  EXPECT_EQ(train.targets, 10.0 * train.inputs.col(0));
  const auto again = split_dataset(d, 0.7, 5);
  EXPECT_EQ(again.first.inputs, train.inputs);
  EXPECT_THROW(split_dataset(d, 1.0, 1), InputError);
  EXPECT_THROW(split_dataset(Dataset{MatrixXd::Zero(1, 1), VectorXd::Zero(1)}, 0.5, 1), InputError);
  const auto tiny = split_dataset(Dataset{MatrixXd::Zero(2, 1), VectorXd::Zero(2)}, 0.99, 1);
  EXPECT_EQ(tiny.second.size(), 1);
}
