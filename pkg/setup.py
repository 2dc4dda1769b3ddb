"""
Setup and Installation Script
Prepares a working copy of TierSim: dependencies, settings and output directories
"""

import shutil
import subprocess
import sys
from pathlib import Path


def check_python_version():
    """Check if Python version is compatible"""
    if sys.version_info < (3, 8):
        print("✗ Python 3.8 or higher is required")
        sys.exit(1)
    print(f"✓ Python {sys.version_info.major}.{sys.version_info.minor} detected")


def install_dependencies():
    """Install required Python packages"""
    print("\nInstalling dependencies...")

    try:
        result = subprocess.run(
            [sys.executable, "-m", "pip", "install", "-r", "requirements.txt"],
            capture_output=True,
            text=True
        )

        if result.returncode == 0:
            print("✓ Dependencies installed successfully")
            return True
        else:
            print(f"✗ Failed to install dependencies: {result.stderr}")
            return False
    except Exception as e:
        print(f"✗ Error installing dependencies: {e}")
        return False


def create_user_settings():
    """Create user_settings.txt from the example"""
    user_settings_path = Path("config/user_settings.txt")
    example_settings_path = Path("config/user_settings.example.txt")

    if user_settings_path.exists():
        response = input("\nUser settings already exist. Overwrite? (y/N): ")
        if response.lower() != 'y':
            print("Keeping existing user settings")
            return True

    try:
        shutil.copy(example_settings_path, user_settings_path)
        print(f"✓ Created user settings file: {user_settings_path}")
    except Exception as e:
        print(f"✗ Could not create user settings: {e}")
        return False

    trace_dir = input("Directory for trace files (leave empty for 'traces'): ").strip()
    if trace_dir:
        content = user_settings_path.read_text(encoding='utf-8')
        content = content.replace("TRACE_DIR=traces", f"TRACE_DIR={trace_dir}")
        user_settings_path.write_text(content, encoding='utf-8')
        print(f"✓ TRACE_DIR set to: {trace_dir}")
    return True


def create_directories():
    """Create the default trace and results directories"""
    for name in ("traces", "results"):
        Path(name).mkdir(exist_ok=True)
        print(f"✓ Directory ready: {name}/")


def generate_sample_trace():
    """Write a HotBlocks sample trace for the replay example"""
    result = subprocess.run(
        [sys.executable, "main.py", "gen-trace", "--kind", "HotBlocks",
         "--events", "100000", "--region-mb", "128", "--out", "traces/hotblocks.trace"],
        capture_output=True,
        text=True
    )
    if result.returncode == 0:
        print("✓ Sample trace written to traces/hotblocks.trace")
    else:
        print(f"⚠ Could not generate the sample trace: {result.stderr.strip()}")


def main():
    """Main setup routine"""
    print("""
    ╔═══════════════════════════════════════════╗
    ║   TierSim Setup                           ║
    ╚═══════════════════════════════════════════╝
    """)

    check_python_version()

    if not install_dependencies():
        print("\n✗ Setup failed: Could not install dependencies")
        sys.exit(1)

    if not create_user_settings():
        print("\n✗ Setup failed: Could not create user settings")
        sys.exit(1)

    create_directories()

    response = input("\nGenerate a sample trace? (Y/n): ")
    if response.lower() != 'n':
        generate_sample_trace()

    print("\n" + "="*50)
    print("Setup Complete!")
    print("="*50)
    print("\nNext steps:")
    print("  1. Run: python main.py sweep --config config/sweep.example.json")
    print("  2. Inspect results/results.csv")
    print("\nFor more information, see README.md")


if __name__ == "__main__":
    main()
