#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "riskcard/raw_data.hpp"

namespace riskcard {

// Header plus string fields; quoted fields follow RFC 4180.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& table);

// Empty fields and the literal "NA" are missing; fields that parse fully as
// a finite number become numbers; anything else is a category token. When
// `label_column` is given it is removed from the variables and used as labels.
RawDataset to_raw_dataset(const CsvTable& table,
                          const std::optional<std::string>& label_column);

}  // namespace riskcard
