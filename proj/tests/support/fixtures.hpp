#pragma once

// Small corpus fixtures written to a per-test temporary directory.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fixtures {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("bioaudit_test_" + tag + "_" + std::to_string(counter()++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

    std::string write(const std::string& name, const std::string& content) const {
        const auto file = path_ / name;
        std::ofstream out(file, std::ios::binary);
        out << content;
        return file.string();
    }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::filesystem::path path_;
};

inline std::string bio_line(const std::string& id, const std::string& gender, int birth_year,
                            const std::string& cls = "Person", int editions = 1,
                            const std::string& summary = "",
                            const std::vector<std::string>& attributes = {}) {
    std::string attrs;
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (i) attrs += ",";
        attrs += "\"" + attributes[i] + "\"";
    }
    return "{\"id\":\"" + id + "\",\"name\":\"" + id + "\",\"gender\":\"" + gender +
           "\",\"birth_year\":" + std::to_string(birth_year) +
           ",\"death_year\":null,\"class\":\"" + cls +
           "\",\"edition_count\":" + std::to_string(editions) + ",\"attributes\":[" + attrs +
           "],\"summary\":\"" + summary + "\"}";
}

}  // namespace fixtures
