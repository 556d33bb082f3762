import logging
import shlex
import subprocess
from pathlib import Path
from typing import Optional, Union

from config.config import Config
from src.perception.detections import DetectionSet, parse_detections
from src.utils.errors import DetectionError, DetectorError, InputError


class ExternalDetector:
    def __init__(self, command_template: str, timeout: Optional[float] = None):
        """
        Initialize the adapter around an external classifier process

        Args:
            command_template (str): Command line with an `{image}` placeholder
            timeout (float): Seconds before the process is killed
        """
        if Config.IMAGE_PLACEHOLDER not in command_template:
            raise InputError(f"detector command must contain the {Config.IMAGE_PLACEHOLDER} placeholder")
        self.command_template = command_template
        self.timeout = Config.DETECTOR_TIMEOUT if timeout is None else timeout

    def build_command(self, image_path: Union[str, Path]) -> list:
        # Split first so paths with spaces stay one argument
        return [
            part.replace(Config.IMAGE_PLACEHOLDER, str(image_path))
            for part in shlex.split(self.command_template)
        ]

    def detect(self, image_path: Union[str, Path]) -> DetectionSet:
        """
        Run the detector on one image and parse its standard output

        Args:
            image_path (str | Path): Photo handed to the detector

        Returns:
            DetectionSet: detections emitted by the process

        Raises:
            DetectorError: nonzero exit, timeout or malformed output (stderr attached)
        """
        image_path = Path(image_path)
        if not image_path.is_file():
            raise InputError(f"image file not found: {image_path}")

        command = self.build_command(image_path)
        logging.info(f"Running detector: {' '.join(command)}")
        try:
            completed = subprocess.run(
                command,
                capture_output=True,
                timeout=self.timeout,
                check=False,
            )
        except subprocess.TimeoutExpired as e:
            stderr = (e.stderr or b"").decode("utf-8", errors="replace")
            raise DetectorError(f"detector timed out after {self.timeout:g} s", stderr=stderr)
        except OSError as e:
            raise DetectorError(f"could not start detector: {e}")

        stderr = completed.stderr.decode("utf-8", errors="replace")
        if completed.returncode != 0:
            raise DetectorError(
                f"detector exited with status {completed.returncode}",
                stderr=stderr,
                returncode=completed.returncode,
            )

        try:
            return parse_detections(completed.stdout.decode("utf-8"), default_photo_id=image_path.stem)
        except (DetectionError, UnicodeDecodeError) as e:
            raise DetectorError(f"detector output rejected: {e}", stderr=stderr)


def run_external_detector(command_template: str, image_path: Union[str, Path],
                          timeout: Optional[float] = None) -> DetectionSet:
    """Wrapper to run the external detector once."""
    return ExternalDetector(command_template, timeout=timeout).detect(image_path)
