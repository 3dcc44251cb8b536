#include <exception>
#include <iostream>

#include "magbern/cli/commands.hpp"

int main(int argc, char** argv) {
    magbern::cli::CommandLine cl;
    try {
        const auto cfg = cl.parse(argc, argv);
        return magbern::cli::run(cfg, std::cout);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return cl.app().exit(e);
        std::cerr << "magbern: " << e.what() << '\n';
        return static_cast<int>(magbern::ErrorCategory::validation);
    } catch (const magbern::Error& e) {
        std::cerr << "magbern: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::bad_alloc&) {
        std::cerr << "magbern: out of memory\n";
        return static_cast<int>(magbern::ErrorCategory::resource);
    }
}
