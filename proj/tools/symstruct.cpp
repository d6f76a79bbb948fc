// symstruct.cpp: command-line tool

#include "symstruct/cli.hpp"

int main(int argc, char** argv)
{
    return symstruct::cli::run(argc, argv);
}
