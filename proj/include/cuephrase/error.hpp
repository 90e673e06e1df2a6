#pragma once

#include <stdexcept>
#include <string>

namespace cuephrase {

// Raised for malformed corpus/model files and contract violations that stem
// from bad input data (as opposed to programmer misuse, which throws
// std::invalid_argument). Carries row/column context when it is known.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& message)
        : std::runtime_error(message), raw_(message), row_(0) {}

    DataError(const std::string& message, std::size_t row, std::string column)
        : std::runtime_error(format(message, row, column)),
          raw_(message),
          row_(row),
          column_(std::move(column)) {}

    std::size_t row() const { return row_; }
    const std::string& column() const { return column_; }
    const std::string& raw_message() const { return raw_; }

private:
    static std::string format(const std::string& message, std::size_t row,
                              const std::string& column) {
        std::string out;
        if (row > 0) {
            out = "row " + std::to_string(row);
            if (!column.empty()) out += ", column " + column;
            out += ": ";
        } else if (!column.empty()) {
            out = "column " + column + ": ";
        }
        return out + message;
    }

    std::string raw_;
    std::size_t row_;
    std::string column_;
};

}  // namespace cuephrase
