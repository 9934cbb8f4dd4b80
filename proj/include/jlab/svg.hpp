#pragma once

#include <string>
#include <vector>

namespace jlab {

/// Standalone SVG line chart. Non-finite samples break a series into
/// separate polylines.
class LinePlot {
 public:
  LinePlot(std::string title, std::string xlabel, std::string ylabel);

  void add_series(std::string name, std::vector<double> x, std::vector<double> y,
                  bool markers = false);

  [[nodiscard]] std::string render(int width = 720, int height = 440) const;
  void write(const std::string& path) const;

 private:
  struct Series {
    std::string name;
    std::vector<double> x, y;
    bool markers;
  };
  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
};

}  // namespace jlab
