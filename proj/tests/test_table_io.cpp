#include <gtest/gtest.h>

#include <filesystem>

#include "imfkit/imf_table.hpp"
#include "imfkit/synth.hpp"

using namespace imfkit;

namespace {

ImfTable random_table(synth::Rng& rng) {
  ImfTable t;
  const double density = rng.uniform();
  for (int z = 0; z < 256; ++z)
    if (rng.uniform() < density) t.set(z, rng.uniform(-50, 300) / 3.0);
  return t;
}

}  // namespace

TEST(TableCsv, RoundTripProperty) {
  synth::Rng rng(61);
  for (int i = 0; i < 100; ++i) {
    const auto t = random_table(rng);
    EXPECT_EQ(table_from_csv(table_to_csv(t)), t);
  }
}

TEST(TableCsv, Layout) {
  ImfTable t;
  t.set(0, 0.5);
  const auto csv = table_to_csv(t);
  EXPECT_EQ(csv.rfind("z,value,present\n0,0.5,1\n1,,0\n", 0), 0u);
}

TEST(TableCsv, Malformed) {
  EXPECT_THROW(table_from_csv("wrong\n"), InvalidArgument);
  EXPECT_THROW(table_from_csv("z,value,present\n300,1,1\n"), InvalidArgument);
  EXPECT_THROW(table_from_csv("z,value,present\n3,1,1\n3,2,1\n"), InvalidArgument);
  EXPECT_THROW(table_from_csv("z,value,present\n3,abc,1\n"), InvalidArgument);
  EXPECT_THROW(table_from_csv("z,value,present\n3\n"), InvalidArgument);
}

TEST(TableJson, RoundTripProperty) {
  synth::Rng rng(62);
  for (int i = 0; i < 50; ++i) {
    ChannelTables tables;
    const int channels = rng.uniform() < 0.5 ? 1 : 3;
    for (int c = 0; c < channels; ++c) tables.push_back(random_table(rng));
    EXPECT_EQ(tables_from_json(tables_to_json(tables)), tables);
    EXPECT_EQ(tables_from_json(nlohmann::json::parse(tables_to_json(tables).dump())), tables);
  }
}

TEST(TableJson, Malformed) {
  EXPECT_THROW(tables_from_json(nlohmann::json::object()), InvalidArgument);
  EXPECT_THROW(tables_from_json({{"channels", {{1, 2, 3}}}}), InvalidArgument);
  EXPECT_THROW(tables_from_json({{"levels", 128}, {"channels", nlohmann::json::array()}}),
               InvalidArgument);
}

TEST(TableFiles, SaveLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "imfkit_test_table_io";
  std::filesystem::create_directories(dir);
  synth::Rng rng(63);
  const auto t = random_table(rng);
  save_table_csv(t, dir / "t.csv");
  EXPECT_EQ(load_table_csv(dir / "t.csv"), t);
  save_tables_json({t, t}, dir / "t.json");
  EXPECT_EQ(load_tables_json(dir / "t.json"), (ChannelTables{t, t}));
  EXPECT_THROW(load_table_csv(dir / "missing.csv"), IoError);
  write_text(dir / "bad.json", "{not json");
  EXPECT_THROW(load_tables_json(dir / "bad.json"), InvalidArgument);
}
